use num_complex::Complex64;

const WINDOW: usize = 24;

/// Wynn's epsilon algorithm on a stream of partial sums.
///
/// Besides accelerating convergent alternating tails, the same transform
/// assigns the Abel value to oscillatory series whose terms grow
/// polynomially, which is what the Schrödinger transform tails need.
#[derive(Clone, Debug, Default)]
pub struct WynnEpsilon {
    sums: Vec<Complex64>,
    history: Vec<Complex64>,
}

#[derive(Clone, Copy, Debug)]
pub struct Extrapolation {
    pub value: Complex64,
    pub error: f64,
}

impl WynnEpsilon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    /// Adds the next partial sum and returns the current extrapolation.
    /// The error estimate is infinite until three estimates exist.
    pub fn push(&mut self, partial: Complex64) -> Extrapolation {
        self.sums.push(partial);
        if self.sums.len() > WINDOW {
            self.sums.remove(0);
        }
        let value = self.extrapolate();
        self.history.push(value);
        let h = &self.history;
        let error = if h.len() >= 3 {
            let n = h.len();
            (value - h[n - 2]).norm().max((value - h[n - 3]).norm())
        } else {
            f64::INFINITY
        };
        Extrapolation { value, error }
    }

    fn extrapolate(&self) -> Complex64 {
        let n = self.sums.len();
        if n < 3 {
            return self.sums[n - 1];
        }
        let mut prev = vec![Complex64::new(0.0, 0.0); n + 1];
        let mut cur: Vec<Complex64> = self.sums.clone();
        let mut best = cur[n - 1];
        let mut k = 0;
        while cur.len() >= 2 {
            let mut next = Vec::with_capacity(cur.len() - 1);
            for j in 0..cur.len() - 1 {
                let d = cur[j + 1] - cur[j];
                if d.norm() == 0.0 || !d.norm().is_finite() {
                    return best;
                }
                next.push(prev[j + 1] + d.inv());
            }
            k += 1;
            if next.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return best;
            }
            if k % 2 == 0 {
                best = *next.last().expect("non-empty column");
            }
            prev = cur;
            cur = next;
        }
        best
    }
}
