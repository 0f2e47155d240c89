use super::SolverError;

/// Cholesky factor of a symmetric positive definite band matrix.
///
/// Row `k` stores columns `k - p ..= k` at offsets `0 ..= p`, so entry
/// `(k, l)` with `k - p <= l <= k` lives at `k * (p + 1) + (l + p - k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedCholesky {
    n: usize,
    p: usize,
    l: Vec<f64>,
}

impl BandedCholesky {
    /// Factors the band in the layout above.
    pub fn factor(n: usize, p: usize, mut band: Vec<f64>) -> Result<Self, SolverError> {
        let w = p + 1;
        if band.len() != n * w {
            return Err(SolverError::Config(format!(
                "band storage has {} entries, expected {}",
                band.len(),
                n * w
            )));
        }
        for i in 0..n {
            let lo = i.saturating_sub(p);
            for j in lo..=i {
                // dot of rows i and j over columns lo_ij .. j
                let start = lo.max(j.saturating_sub(p));
                let mut s = band[i * w + (j + p - i)];
                let ri = i * w + (start + p - i);
                let rj = j * w + (start + p - j);
                for m in 0..(j - start) {
                    s -= band[ri + m] * band[rj + m];
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(SolverError::Config(format!("matrix not positive definite at row {i}")));
                    }
                    band[i * w + p] = s.sqrt();
                } else {
                    band[i * w + (j + p - i)] = s / band[j * w + p];
                }
            }
        }
        Ok(Self { n, p, l: band })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, p, w) = (self.n, self.p, self.p + 1);
        assert_eq!(b.len(), n);
        for i in 0..n {
            let lo = i.saturating_sub(p);
            let row = i * w + (lo + p - i);
            let mut s = b[i];
            for (m, bm) in b[lo..i].iter().enumerate() {
                s -= self.l[row + m] * bm;
            }
            b[i] = s / self.l[i * w + p];
        }
        for i in (0..n).rev() {
            let hi = (i + p).min(n - 1);
            let mut s = b[i];
            for (k, bk) in b.iter().enumerate().take(hi + 1).skip(i + 1) {
                s -= self.l[k * w + (i + p - k)] * bk;
            }
            b[i] = s / self.l[i * w + p];
        }
    }
}
