//! Mixed-radix coding of tuples, most significant coordinate first.

/// Bijection between tuples `(a(0), …, a(m-1))` with `a(i) < radices[i]` and
/// the integers `0..Π radices`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MixedRadix {
    radices: Vec<usize>,
    // weights[i] = Π_{j > i} radices[j]
    weights: Vec<usize>,
    total: usize,
}

impl MixedRadix {
    /// Returns `None` if the product of the radices overflows.
    pub fn new(radices: Vec<usize>) -> Option<Self> {
        let mut weights = vec![1; radices.len()];
        let mut total: usize = 1;
        for i in (0..radices.len()).rev() {
            weights[i] = total;
            total = total.checked_mul(radices[i])?;
        }
        Some(MixedRadix {
            radices,
            weights,
            total,
        })
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn len(&self) -> usize {
        self.radices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radices.is_empty()
    }

    /// Number of encodable tuples.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.radices.len());
        digits.iter().zip(&self.weights).map(|(&d, &w)| d * w).sum()
    }

    pub fn decode(&self, code: usize) -> Vec<usize> {
        let mut out = vec![0; self.radices.len()];
        self.decode_into(code, &mut out);
        out
    }

    pub fn decode_into(&self, mut code: usize, out: &mut [usize]) {
        for i in (0..self.radices.len()).rev() {
            out[i] = code % self.radices[i];
            code /= self.radices[i];
        }
    }

    /// Digit `i` of `code` without decoding the whole tuple.
    pub fn digit(&self, code: usize, i: usize) -> usize {
        (code / self.weights[i]) % self.radices[i]
    }
}

/// Row-major index of an argument tuple in an operation table over a carrier
/// of size `n`: `Σ args[j]·n^(k−1−j)`.
pub fn table_index(n: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

/// Calls `f` on every tuple in `{0..n}^k` in table order.
pub fn for_each_tuple(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut tuple = vec![0; k];
    if k == 0 {
        f(&tuple);
        return;
    }
    if n == 0 {
        return;
    }
    loop {
        f(&tuple);
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < n {
                break;
            }
            tuple[pos] = 0;
        }
    }
}
