use crate::qspace::{C64, ZERO};

/// LU factorization with partial pivoting of a banded matrix, stored
/// column-major with room for the fill-in that row swaps create.
///
/// Entry (i, j) lives at `kl + ku + i − j` within column j. The first kl
/// slots of every column start empty and absorb fill-in.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ab: Vec<C64>,
    pivots: Vec<usize>,
    factored: bool,
}

impl BandLu {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ab: vec![ZERO; ldab * n],
            pivots: Vec::new(),
            factored: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn ldab(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        (self.kl + self.ku + i - j) + j * self.ldab()
    }

    /// Adds `v` to entry (i, j), which must lie inside the band.
    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        assert!(!self.factored, "matrix already factored");
        assert!(
            i < self.n && j < self.n,
            "({i}, {j}) outside {0}x{0}",
            self.n
        );
        assert!(
            i <= j + self.kl && j <= i + self.ku,
            "({i}, {j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let k = self.at(i, j);
        self.ab[k] += v;
    }

    /// Zeroes row i inside the band.
    pub fn clear_row(&mut self, i: usize) {
        assert!(!self.factored, "matrix already factored");
        let lo = i.saturating_sub(self.kl);
        let hi = (i + self.ku).min(self.n - 1);
        for j in lo..=hi {
            let k = self.at(i, j);
            self.ab[k] = ZERO;
        }
    }

    /// Factors in place and returns min |u_jj| / max |u_jj|, zero when a
    /// pivot vanishes exactly.
    pub fn factor(&mut self) -> f64 {
        assert!(!self.factored, "matrix already factored");
        let n = self.n;
        let kl = self.kl;
        let kv = self.kl + self.ku;
        let ldab = self.ldab();
        self.pivots = vec![0; n];
        let mut ju = 0usize;
        let (mut pmin, mut pmax) = (f64::INFINITY, 0.0f64);
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let col = j * ldab;
            let mut jp = 0;
            let mut best = -1.0;
            for t in 0..=km {
                let a = self.ab[col + kv + t].norm();
                if a > best {
                    best = a;
                    jp = t;
                }
            }
            self.pivots[j] = j + jp;
            if best == 0.0 {
                pmin = 0.0;
                continue;
            }
            ju = ju.max((j + self.ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    let a = kv + j - c + c * ldab;
                    let b = kv + j + jp - c + c * ldab;
                    self.ab.swap(a, b);
                }
            }
            let piv = self.ab[col + kv];
            pmin = pmin.min(piv.norm());
            pmax = pmax.max(piv.norm());
            if km > 0 {
                let inv = piv.inv();
                for t in 1..=km {
                    self.ab[col + kv + t] *= inv;
                }
                for c in j + 1..=ju {
                    let u = self.ab[kv + j - c + c * ldab];
                    if u == ZERO {
                        continue;
                    }
                    let base = kv + j - c + c * ldab;
                    for t in 1..=km {
                        let l = self.ab[col + kv + t];
                        self.ab[base + t] -= l * u;
                    }
                }
            }
        }
        self.factored = true;
        if pmax == 0.0 {
            0.0
        } else {
            pmin / pmax
        }
    }

    /// Solves A x = b in place using the factors.
    pub fn solve_in_place(&self, b: &mut [C64]) {
        assert!(self.factored, "call factor() first");
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let kv = self.kl + self.ku;
        let ldab = self.ldab();
        for j in 0..n {
            let p = self.pivots[j];
            if p != j {
                b.swap(j, p);
            }
            let km = self.kl.min(n - 1 - j);
            let bj = b[j];
            if bj != ZERO {
                for t in 1..=km {
                    b[j + t] -= self.ab[j * ldab + kv + t] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.ab[j * ldab + kv];
            let bj = b[j];
            if bj == ZERO {
                continue;
            }
            let lo = j.saturating_sub(kv);
            let col = &self.ab[kv + lo - j + j * ldab..kv + j * ldab];
            for (bi, &u) in b[lo..j].iter_mut().zip(col) {
                *bi -= u * bj;
            }
        }
    }
}
