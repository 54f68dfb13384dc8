//! Dense GF(2) linear algebra on u64-packed rows.
//!
//! Sized for sign-class systems: a few hundred variables (face classes) and
//! rows (cubes / interior vertices), so plain Gaussian elimination is plenty.

/// Row-major bit matrix over GF(2).
#[derive(Debug, Clone)]
pub struct BitMatrix {
    rows: Vec<Vec<u64>>,
    cols: usize,
}

const W: usize = 64;

fn words(cols: usize) -> usize {
    cols.div_ceil(W)
}

impl BitMatrix {
    pub fn zero(nrows: usize, cols: usize) -> Self {
        BitMatrix {
            rows: vec![vec![0; words(cols)]; nrows],
            cols,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r][c / W] >> (c % W) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let mask = 1u64 << (c % W);
        if v {
            self.rows[r][c / W] |= mask;
        } else {
            self.rows[r][c / W] &= !mask;
        }
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.rows[r][c / W] ^= 1u64 << (c % W);
    }

    pub fn push_row(&mut self, bits: &[usize]) {
        let mut row = vec![0u64; words(self.cols)];
        for &c in bits {
            assert!(c < self.cols);
            row[c / W] ^= 1u64 << (c % W);
        }
        self.rows.push(row);
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        let (a, b) = if dst < src {
            let (lo, hi) = self.rows.split_at_mut(src);
            (&mut lo[dst], &hi[0])
        } else {
            let (lo, hi) = self.rows.split_at_mut(dst);
            (&mut hi[0], &lo[src])
        };
        for (x, y) in a.iter_mut().zip(b.iter()) {
            *x ^= *y;
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_reduce(&mut Vec::new()).len()
    }

    /// In-place row reduction; returns the pivot columns. `rhs` (one bit per
    /// row) is carried along when nonempty.
    fn row_reduce(&mut self, rhs: &mut Vec<bool>) -> Vec<usize> {
        let carry = !rhs.is_empty();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..self.nrows()).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.rows.swap(r, p);
            if carry {
                rhs.swap(r, p);
            }
            for i in 0..self.nrows() {
                if i != r && self.get(i, c) {
                    self.xor_rows(i, r);
                    if carry {
                        rhs[i] ^= rhs[r];
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == self.nrows() {
                break;
            }
        }
        pivots
    }

    /// Solve `A x = b`, returning any solution (free variables set to 0), or
    /// `None` when inconsistent.
    pub fn solve(&self, b: &[bool]) -> Option<Vec<bool>> {
        assert_eq!(b.len(), self.nrows());
        let mut m = self.clone();
        let mut rhs = b.to_vec();
        let pivots = m.row_reduce(&mut rhs);
        for (i, &bi) in rhs.iter().enumerate() {
            if i >= pivots.len() && bi {
                return None;
            }
        }
        let mut x = vec![false; self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = rhs[i];
        }
        Some(x)
    }

    /// Dimension of the null space (right kernel).
    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// `A x` as a bit vector.
    pub fn apply(&self, x: &[bool]) -> Vec<bool> {
        assert_eq!(x.len(), self.cols);
        self.rows
            .iter()
            .map(|row| {
                let mut acc = 0u64;
                for (w, word) in row.iter().enumerate() {
                    let mut bits = *word;
                    while bits != 0 {
                        let c = w * W + bits.trailing_zeros() as usize;
                        if x[c] {
                            acc ^= 1;
                        }
                        bits &= bits - 1;
                    }
                }
                acc == 1
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(cols: usize, rows: &[&[usize]]) -> BitMatrix {
        let mut m = BitMatrix::zero(0, cols);
        for r in rows {
            m.push_row(r);
        }
        m
    }

    #[test]
    fn rank_and_nullity() {
        // rows: x0+x1, x1+x2, x0+x2 (third = sum of first two)
        let m = from_rows(3, &[&[0, 1], &[1, 2], &[0, 2]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.nullity(), 1);
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = from_rows(3, &[&[0, 1], &[1, 2]]);
        let x = m.solve(&[true, false]).unwrap();
        assert_eq!(m.apply(&x), vec![true, false]);

        // x0+x1 = 1 and x0+x1 = 0 is inconsistent.
        let m2 = from_rows(2, &[&[0, 1], &[0, 1]]);
        assert!(m2.solve(&[true, false]).is_none());
    }

    #[test]
    fn duplicate_bits_cancel() {
        let mut m = BitMatrix::zero(0, 2);
        m.push_row(&[0, 0, 1]);
        assert!(!m.get(0, 0));
        assert!(m.get(0, 1));
    }
}
