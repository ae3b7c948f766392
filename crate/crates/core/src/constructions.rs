//! Concrete designs: PG(n-1, 2) and its complement, Sylvester Hadamard
//! matrices with their 2- and 3-designs, and the (16, 6, 2) biplane with the
//! symmetric difference property.
//!
//! Coordinates: a nonzero vector `x` of the `n`-dimensional binary space is
//! stored as the integer `x` (coordinate `i` = bit `i`) and is point `x - 1`.

use thiserror::Error;

use crate::design::Design;
use crate::gf2::BitVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("n = {n} is outside {min}..={max}")]
    DimensionOutOfRange { n: usize, min: usize, max: usize },
    #[error(transparent)]
    Hadamard(#[from] HadamardError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HadamardError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("entry ({row}, {col}) is {value}, expected +1 or -1")]
    BadEntry { row: usize, col: usize, value: i8 },
    #[error("order {0} is not 1, 2 or a multiple of 4")]
    BadOrder(usize),
    #[error("rows {0} and {1} are not orthogonal")]
    NotOrthogonal(usize, usize),
    #[error("order {0} is below the minimum of 8 for design extraction")]
    OrderTooSmall(usize),
}

#[inline]
fn parity(x: usize) -> bool {
    x.count_ones() % 2 == 1
}

fn check_n(n: usize, min: usize, max: usize) -> Result<(), ConstructionError> {
    if (min..=max).contains(&n) {
        Ok(())
    } else {
        Err(ConstructionError::DimensionOutOfRange { n, min, max })
    }
}

fn pg_blocks(n: usize, inner_product: bool) -> Result<Design, ConstructionError> {
    check_n(n, 2, 10)?;
    let v = (1usize << n) - 1;
    let blocks = (1..=v)
        .map(|a| {
            let mut block = BitVector::zeros(v);
            for x in 1..=v {
                if parity(a & x) == inner_product {
                    block.set(x - 1, true);
                }
            }
            block
        })
        .collect();
    Ok(Design::new(v, blocks).expect("hyperplanes are proper nonempty subsets"))
}

/// Points and hyperplanes of PG(n-1, 2): one block `{x != 0 : <a, x> = 0}`
/// per nonzero functional `a`.
pub fn pg_hyperplanes(n: usize) -> Result<Design, ConstructionError> {
    pg_blocks(n, false)
}

/// Complement of PG(n-1, 2): blocks `{x != 0 : <a, x> = 1}`. A
/// `(2^n - 1, 2^(n-1), 2^(n-2))` symmetric design whose blocks together with
/// the empty set are closed under symmetric difference.
pub fn pg_complement(n: usize) -> Result<Design, ConstructionError> {
    pg_blocks(n, true)
}

/// Block `B_a` of [`pg_complement`] for the nonzero functional `a`.
pub fn pg_complement_block(n: usize, a: usize) -> BitVector {
    let v = (1usize << n) - 1;
    let mut block = BitVector::zeros(v);
    for x in 1..=v {
        if parity(a & x) {
            block.set(x - 1, true);
        }
    }
    block
}

/// Square matrix with entries `+1` / `-1` and pairwise orthogonal rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HadamardMatrix {
    order: usize,
    entries: Vec<i8>,
}

impl HadamardMatrix {
    /// Validates `H H^T = order * I` in exact integer arithmetic.
    pub fn from_rows(rows: Vec<Vec<i8>>) -> Result<Self, HadamardError> {
        let order = rows.len();
        if rows.iter().any(|r| r.len() != order) {
            return Err(HadamardError::NotSquare);
        }
        for (i, r) in rows.iter().enumerate() {
            if let Some((j, &value)) = r.iter().enumerate().find(|(_, &e)| e != 1 && e != -1) {
                return Err(HadamardError::BadEntry { row: i, col: j, value });
            }
        }
        if !(order <= 2 || order % 4 == 0) || order == 0 {
            return Err(HadamardError::BadOrder(order));
        }
        let h = Self {
            order,
            entries: rows.into_iter().flatten().collect(),
        };
        if let Some((i, j)) = h.first_non_orthogonal_pair() {
            return Err(HadamardError::NotOrthogonal(i, j));
        }
        Ok(h)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.entries[row * self.order + col]
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.order..(i + 1) * self.order]
    }

    pub fn to_rows(&self) -> Vec<Vec<i8>> {
        (0..self.order).map(|i| self.row(i).to_vec()).collect()
    }

    /// First pair `i < j` (including `i = j` norm failures) with
    /// `sum_k H[i][k] H[j][k] != order * [i = j]`.
    pub fn first_non_orthogonal_pair(&self) -> Option<(usize, usize)> {
        let n = self.order as i64;
        for i in 0..self.order {
            for j in i..self.order {
                let dot: i64 = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .map(|(&a, &b)| i64::from(a) * i64::from(b))
                    .sum();
                if dot != if i == j { n } else { 0 } {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_normalized(&self) -> bool {
        (0..self.order).all(|k| self.get(0, k) == 1 && self.get(k, 0) == 1)
    }

    /// Negates every column whose first entry is `-1`, then every row whose
    /// first entry is `-1`.
    pub fn normalized(&self) -> Self {
        let mut h = self.clone();
        let n = self.order;
        for j in 0..n {
            if h.get(0, j) == -1 {
                for i in 0..n {
                    h.entries[i * n + j] = -h.entries[i * n + j];
                }
            }
        }
        for i in 0..n {
            if h.get(i, 0) == -1 {
                for e in &mut h.entries[i * n..(i + 1) * n] {
                    *e = -*e;
                }
            }
        }
        h
    }

    /// Row `i` of the result is row `rows[i]` of `self`, and likewise for columns.
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> Self {
        let n = self.order;
        assert!(rows.len() == n && cols.len() == n);
        let entries = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.get(rows[i], cols[j]))
            .collect();
        Self { order: n, entries }
    }

    fn check_extractable(&self) -> Result<Self, HadamardError> {
        if self.order < 8 {
            return Err(HadamardError::OrderTooSmall(self.order));
        }
        if self.order % 4 != 0 {
            return Err(HadamardError::BadOrder(self.order));
        }
        Ok(self.normalized())
    }
}

/// Sylvester matrix of order `2^n`: entry `(i, j)` is `(-1)^<i, j>`.
pub fn sylvester_hadamard(n: usize) -> Result<HadamardMatrix, ConstructionError> {
    check_n(n, 0, 10)?;
    let order = 1usize << n;
    let entries = (0..order)
        .flat_map(|i| (0..order).map(move |j| if parity(i & j) { -1 } else { 1 }))
        .collect();
    Ok(HadamardMatrix { order, entries })
}

/// Symmetric 2-design of a Hadamard matrix of order `4t >= 8`: normalize,
/// drop the first row and column, and take as block `j` the rows holding `-1`
/// in column `j`. Gives a `(4t - 1, 2t, t)` design.
pub fn hadamard_to_2design(h: &HadamardMatrix) -> Result<Design, ConstructionError> {
    let h = h.check_extractable()?;
    let v = h.order - 1;
    let blocks = (1..h.order)
        .map(|j| {
            let mut block = BitVector::zeros(v);
            for i in 1..h.order {
                if h.get(i, j) == -1 {
                    block.set(i - 1, true);
                }
            }
            block
        })
        .collect();
    Ok(Design::new(v, blocks).expect("normalized Hadamard columns are balanced"))
}

/// Hadamard 3-design: points are the columns; every non-first row of the
/// normalized matrix contributes its `+1` set and its `-1` set as blocks.
/// Gives a `3-(4t, 2t, t - 1)` design closed under complementation.
pub fn hadamard_to_3design(h: &HadamardMatrix) -> Result<Design, ConstructionError> {
    let h = h.check_extractable()?;
    let v = h.order;
    let mut blocks = Vec::with_capacity(2 * (v - 1));
    for i in 1..v {
        let mut plus = BitVector::zeros(v);
        for j in 0..v {
            if h.get(i, j) == 1 {
                plus.set(j, true);
            }
        }
        blocks.push(plus.complement());
        blocks.push(plus);
    }
    Ok(Design::new(v, blocks).expect("normalized Hadamard rows are balanced"))
}

/// `x1 x2 + x3 x4` on the 4-dimensional binary space, coordinate `i` = bit `i - 1`.
fn biplane_form(x: usize) -> bool {
    ((x & 1 != 0) && (x & 2 != 0)) != ((x & 4 != 0) && (x & 8 != 0))
}

/// The (16, 6, 2) biplane with the symmetric difference property. Points are
/// the 16 vectors; for each functional `a` the block is the level set of
/// `Q(x) + <a, x>` that has 6 elements.
pub fn sdp_biplane() -> Design {
    let blocks = (0..16)
        .map(|a| {
            let mut ones = BitVector::zeros(16);
            for x in 0..16 {
                if biplane_form(x) != parity(a & x) {
                    ones.set(x, true);
                }
            }
            // Q + <a, .> is bent, so its support has 6 or 10 elements.
            if ones.weight() == 6 {
                ones
            } else {
                ones.complement()
            }
        })
        .collect();
    Design::new(16, blocks).expect("bent level sets are proper subsets")
}
