//! Exact integer linear algebra for the abelianized action of a morphism.
//!
//! Vectors are rows and matrices act on the right: the exponent vector of
//! `uφ` is `v(u) · M`, with `M[x][y] = π_y(xφ)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![vec![BigInt::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = BigInt::one();
        }
        m
    }

    /// Rows must all have length `cols`; an empty row list yields `0 × cols`.
    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged matrix");
                r.iter().map(|&x| BigInt::from(x)).collect()
            })
            .collect();
        IntMatrix {
            rows: data.len(),
            cols,
            data,
        }
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

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i]
    }

    pub fn row_vectors(&self) -> &[Vec<BigInt>] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i][j]
    }

    pub fn to_i64(&self) -> Option<Vec<Vec<i64>>> {
        use num_traits::ToPrimitive;
        self.data
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64()).collect())
            .collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i][j] += &self.data[i][k] * &other.data[k][j];
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> IntMatrix {
        assert!(self.is_square());
        let mut acc = IntMatrix::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self).expect("square");
        }
        acc
    }

    pub fn minus_identity(&self) -> IntMatrix {
        assert!(self.is_square());
        let mut m = self.clone();
        for i in 0..self.rows {
            m.data[i][i] -= 1;
        }
        m
    }

    /// Row vector times matrix.
    pub fn act(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: v.len(),
            });
        }
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                out[j] += vi * &self.data[i][j];
            }
        }
        Ok(out)
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = t / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(if n == 0 { BigInt::one() } else { sign * &a[n - 1][n - 1] })
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.data {
            writeln!(f, "{}", format_vector(r))?;
        }
        Ok(())
    }
}

pub fn format_vector(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn sub_multiple(target: &mut [BigInt], source: &[BigInt], q: &BigInt) {
    for (t, s) in target.iter_mut().zip(source) {
        *t -= q * s;
    }
}

/// Row Hermite normal form: returns `(H, U)` with `H = U·M`, `U` unimodular,
/// `H` in row echelon form with positive pivots, entries above each pivot in
/// `[0, pivot)`, and zero rows last.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.data.clone();
    let mut u = IntMatrix::identity(m.rows).data;
    let mut r = 0;
    for j in 0..m.cols {
        if r == m.rows {
            break;
        }
        loop {
            let pivot = (r..m.rows)
                .filter(|&i| !h[i][j].is_zero())
                .min_by(|&x, &y| h[x][j].abs().cmp(&h[y][j].abs()).then(x.cmp(&y)));
            let Some(p) = pivot else { break };
            h.swap(r, p);
            u.swap(r, p);
            let mut clean = true;
            for i in r + 1..m.rows {
                if h[i][j].is_zero() {
                    continue;
                }
                let q = h[i][j].div_floor(&h[r][j]);
                let (hr, ur) = (h[r].clone(), u[r].clone());
                sub_multiple(&mut h[i], &hr, &q);
                sub_multiple(&mut u[i], &ur, &q);
                if !h[i][j].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h[r][j].is_zero() {
            continue;
        }
        if h[r][j].is_negative() {
            h[r].iter_mut().for_each(|x| *x = -&*x);
            u[r].iter_mut().for_each(|x| *x = -&*x);
        }
        for i in 0..r {
            let q = h[i][j].div_floor(&h[r][j]);
            if !q.is_zero() {
                let (hr, ur) = (h[r].clone(), u[r].clone());
                sub_multiple(&mut h[i], &hr, &q);
                sub_multiple(&mut u[i], &ur, &q);
            }
        }
        r += 1;
    }
    (
        IntMatrix {
            rows: m.rows,
            cols: m.cols,
            data: h,
        },
        IntMatrix {
            rows: m.rows,
            cols: m.rows,
            data: u,
        },
    )
}

/// Basis of `{u ∈ ℤⁿ : u·A = 0}` (rows of the transform matching zero rows of
/// the Hermite form), itself brought to Hermite form.
pub fn left_kernel(a: &IntMatrix) -> Lattice {
    let (h, u) = hermite_normal_form(a);
    let rows: Vec<Vec<BigInt>> = (0..a.rows)
        .filter(|&i| h.data[i].iter().all(Zero::is_zero))
        .map(|i| u.data[i].clone())
        .collect();
    Lattice::span(rows, a.rows).expect("kernel rows have matching length")
}

/// Subgroup of `ℤⁿ` held as a Hermite basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    basis: Vec<Vec<BigInt>>,
    dim: usize,
}

impl Lattice {
    /// The lattice spanned by arbitrary generating rows.
    pub fn span(rows: Vec<Vec<BigInt>>, dim: usize) -> Result<Self> {
        let m = IntMatrix::from_rows(rows, dim)?;
        let (h, _) = hermite_normal_form(&m);
        let basis = h
            .data
            .into_iter()
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .collect();
        Ok(Lattice { basis, dim })
    }

    pub fn full(dim: usize) -> Self {
        Lattice {
            basis: IntMatrix::identity(dim).data,
            dim,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Lattice {
            basis: Vec::new(),
            dim,
        }
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn basis_i64(&self) -> Vec<Vec<i64>> {
        use num_traits::ToPrimitive;
        self.basis
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64().expect("entry fits in i64")).collect())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-span membership by back-substitution along the Hermite pivots.
    pub fn contains(&self, v: &[BigInt]) -> Result<bool> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        let mut rest = v.to_vec();
        for row in &self.basis {
            let p = row.iter().position(|x| !x.is_zero()).expect("nonzero basis row");
            // entries left of the pivot must already be cleared
            if rest[..p].iter().any(|x| !x.is_zero()) {
                return Ok(false);
            }
            let (q, r) = rest[p].div_rem(&row[p]);
            if !r.is_zero() {
                return Ok(false);
            }
            sub_multiple(&mut rest, row, &q);
        }
        Ok(rest.iter().all(Zero::is_zero))
    }

    pub fn contains_i64(&self, v: &[i64]) -> Result<bool> {
        let big: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        self.contains(&big)
    }

    pub fn contains_lattice(&self, other: &Lattice) -> Result<bool> {
        for row in &other.basis {
            if !self.contains(row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.basis.iter().map(|r| format_vector(r)).collect();
        write!(f, "{{{}}}", rows.join(", "))
    }
}

/// `{u : u·M = u}`.
pub fn fixed_lattice(m: &IntMatrix) -> Result<Lattice> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            found: m.cols,
        });
    }
    Ok(left_kernel(&m.minus_identity()))
}

/// The lattice generated by `{u : u·Mᵏ = u}` for `k = 1..=kmax`.
pub fn periodic_lattice(m: &IntMatrix, kmax: u32) -> Result<Lattice> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            found: m.cols,
        });
    }
    if kmax == 0 {
        return Err(Error::Precondition("kmax must be at least 1".into()));
    }
    let mut rows = Vec::new();
    let mut power = IntMatrix::identity(m.rows);
    for _ in 1..=kmax {
        power = power.mul(m)?;
        rows.extend(left_kernel(&power.minus_identity()).basis);
    }
    Lattice::span(rows, m.rows)
}
