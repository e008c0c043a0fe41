//! Dense matrices over [`Padic`] with tracked precision.
//!
//! Matrices act on column vectors: column `j` holds the image of basis vector `j`.

mod decomp;
mod series;

pub use decomp::{find_conjugator, JordanChain, WeightDecomposition, WeightSpace};

use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

use crate::padic::{Padic, PadicContext, PadicError, EXACT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    DimensionMismatch { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("{op} needs a square matrix, got {rows}x{cols}")]
    NotSquare { op: &'static str, rows: usize, cols: usize },
    #[error("matrix is singular to precision: best available pivot is O(p^{pivot_valuation})")]
    Singular { pivot_valuation: i64 },
    #[error("{op} outside its domain: entry ({row}, {col}) has valuation {valuation}, needs >= {required}")]
    Domain { op: &'static str, row: usize, col: usize, valuation: i64, required: i64 },
    #[error("matrix is not nilpotent: its {dim}-th power is nonzero")]
    NotNilpotent { dim: usize },
    #[error("spectrum is not integral in [{lo}, {hi}]: eigenspaces found span {found} of {dim} dimensions")]
    SpectrumNotInteger { found: usize, dim: usize, lo: i64, hi: i64 },
    #[error(transparent)]
    Padic(#[from] PadicError),
}

pub type Result<T, E = LinalgError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicMatrix {
    ctx: PadicContext,
    rows: usize,
    cols: usize,
    entries: Vec<Padic>,
}

impl PadicMatrix {
    /// All entries exact zeros.
    pub fn zeros(ctx: PadicContext, rows: usize, cols: usize) -> PadicMatrix {
        PadicMatrix { ctx, rows, cols, entries: vec![Padic::exact_zero(ctx.p()); rows * cols] }
    }

    pub fn identity(ctx: PadicContext, n: usize) -> PadicMatrix {
        let mut m = PadicMatrix::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, ctx.one());
        }
        m
    }

    pub fn from_fn(
        ctx: PadicContext,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Padic,
    ) -> PadicMatrix {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let x = f(i, j);
                assert_eq!(x.p(), ctx.p(), "entry prime differs from context");
                entries.push(x);
            }
        }
        PadicMatrix { ctx, rows, cols, entries }
    }

    pub fn from_rows(ctx: PadicContext, rows: Vec<Vec<Padic>>) -> Result<PadicMatrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch {
                op: "from_rows",
                left: (r, c),
                right: (1, bad.len()),
            });
        }
        if let Some(x) = rows.iter().flatten().find(|x| x.p() != ctx.p()) {
            return Err(PadicError::PrimeMismatch(ctx.p(), x.p()).into());
        }
        Ok(PadicMatrix { ctx, rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_rationals(ctx: PadicContext, rows: &[Vec<BigRational>]) -> Result<PadicMatrix> {
        let rows = rows
            .iter()
            .map(|row| row.iter().map(|q| ctx.from_ratio(q)).collect())
            .collect();
        PadicMatrix::from_rows(ctx, rows)
    }

    pub fn diagonal(ctx: PadicContext, diag: &[Padic]) -> PadicMatrix {
        let mut m = PadicMatrix::zeros(ctx, diag.len(), diag.len());
        for (i, x) in diag.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    /// Columns given as vectors.
    pub fn from_columns(ctx: PadicContext, n_rows: usize, columns: &[Vec<Padic>]) -> PadicMatrix {
        PadicMatrix::from_fn(ctx, n_rows, columns.len(), |i, j| columns[j][i].clone())
    }

    /// Block-diagonal sum; off-block entries are exact zeros.
    pub fn direct_sum(ctx: PadicContext, blocks: &[PadicMatrix]) -> PadicMatrix {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = PadicMatrix::zeros(ctx, n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn ctx(&self) -> PadicContext {
        self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Padic {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Padic) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Padic)> {
        self.entries.iter().enumerate().map(move |(k, x)| (k / self.cols, k % self.cols, x))
    }

    pub fn row_vec(&self, i: usize) -> Vec<Padic> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Padic> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Smallest absolute precision over the entries (`EXACT` if all are exact zeros).
    pub fn min_precision(&self) -> i64 {
        self.entries.iter().map(Padic::precision).min().unwrap_or(EXACT)
    }

    /// Smallest valuation over the entries; zeros count at the precision they are known to.
    pub fn min_valuation(&self) -> i64 {
        self.entries.iter().map(Padic::valuation).min().unwrap_or(EXACT)
    }

    /// The first entry of smallest valuation, in row-major order.
    pub fn worst_entry(&self) -> Option<(usize, usize, &Padic)> {
        self.entries().min_by_key(|(_, _, x)| x.valuation())
    }

    /// Every entry vanishes to its known precision.
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Padic::is_zero)
    }

    /// Every entry has valuation at least `floor`.
    pub fn vanishes_to(&self, floor: i64) -> bool {
        self.min_valuation() >= floor
    }

    pub fn transpose(&self) -> PadicMatrix {
        PadicMatrix::from_fn(self.ctx, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    fn same_shape(&self, other: &PadicMatrix, op: &'static str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                op,
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        Ok(())
    }

    pub(crate) fn require_square(&self, op: &'static str) -> Result<usize> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare { op, rows: self.rows, cols: self.cols });
        }
        Ok(self.rows)
    }

    pub fn add(&self, other: &PadicMatrix) -> Result<PadicMatrix> {
        self.same_shape(other, "add")?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &PadicMatrix) -> Result<PadicMatrix> {
        self.same_shape(other, "sub")?;
        Ok(self.zip(other, |a, b| a - b))
    }

    fn zip(&self, other: &PadicMatrix, f: impl Fn(&Padic, &Padic) -> Padic) -> PadicMatrix {
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect();
        PadicMatrix { ctx: self.ctx, rows: self.rows, cols: self.cols, entries }
    }

    pub fn map(&self, f: impl Fn(&Padic) -> Padic) -> PadicMatrix {
        let entries = self.entries.iter().map(f).collect();
        PadicMatrix { ctx: self.ctx, rows: self.rows, cols: self.cols, entries }
    }

    pub fn try_map(&self, f: impl Fn(&Padic) -> Result<Padic, PadicError>) -> Result<PadicMatrix> {
        let entries = self.entries.iter().map(f).collect::<Result<_, _>>()?;
        Ok(PadicMatrix { ctx: self.ctx, rows: self.rows, cols: self.cols, entries })
    }

    pub fn neg(&self) -> PadicMatrix {
        self.map(|x| -x)
    }

    pub fn scale(&self, s: &Padic) -> PadicMatrix {
        self.map(|x| x * s)
    }

    pub fn div_scalar(&self, s: &Padic) -> Result<PadicMatrix> {
        let inv = s.inv()?;
        Ok(self.scale(&inv))
    }

    pub fn mul(&self, other: &PadicMatrix) -> Result<PadicMatrix> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "mul",
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let p = self.ctx.p();
        Ok(PadicMatrix::from_fn(self.ctx, self.rows, other.cols, |i, j| {
            let mut acc = Padic::exact_zero(p);
            for k in 0..self.cols {
                let (a, b) = (self.get(i, k), other.get(k, j));
                if a.is_exact_zero() || b.is_exact_zero() {
                    continue;
                }
                acc = &acc + &(a * b);
            }
            acc
        }))
    }

    pub fn mul_vec(&self, v: &[Padic]) -> Result<Vec<Padic>> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                op: "mul_vec",
                left: (self.rows, self.cols),
                right: (v.len(), 1),
            });
        }
        let p = self.ctx.p();
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Padic::exact_zero(p), |acc, k| &acc + &(self.get(i, k) * &v[k]))
            })
            .collect())
    }

    pub fn pow(&self, mut e: u64) -> Result<PadicMatrix> {
        let n = self.require_square("pow")?;
        let mut acc = PadicMatrix::identity(self.ctx, n);
        let mut base = self.clone();
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                acc = if first { base.clone() } else { acc.mul(&base)? };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn trace(&self) -> Result<Padic> {
        let n = self.require_square("trace")?;
        Ok((0..n).fold(Padic::exact_zero(self.ctx.p()), |acc, i| &acc + self.get(i, i)))
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &PadicMatrix) -> Result<PadicMatrix> {
        self.require_square("commutator")?;
        self.same_shape(other, "commutator")?;
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Least `r` with `N^r = 0` to known precision.
    pub fn nilpotency_index(&self) -> Result<usize> {
        let n = self.require_square("nilpotency_index")?;
        let mut power = self.clone();
        for r in 1..=n.max(1) {
            if power.is_zero() {
                return Ok(r);
            }
            power = power.mul(self)?;
        }
        Err(LinalgError::NotNilpotent { dim: n })
    }

    /// Like [`nilpotency_index`](Self::nilpotency_index) but an entry counts as
    /// zero once its valuation reaches `floor`.
    pub fn nilpotency_index_to(&self, floor: i64) -> Result<usize> {
        let n = self.require_square("nilpotency_index")?;
        let mut power = self.clone();
        for r in 1..=n.max(1) {
            if power.vanishes_to(floor) {
                return Ok(r);
            }
            power = power.mul(self)?;
        }
        Err(LinalgError::NotNilpotent { dim: n })
    }

    pub fn to_rational_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_rational_string()).collect())
            .collect()
    }
}

impl fmt::Display for PadicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells = self.to_rational_strings();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[ {} ]", line.join("  "))?;
        }
        write!(f, "(min precision O({}^{}))", self.ctx.p(), self.min_precision())
    }
}
