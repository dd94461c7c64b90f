use num_complex::Complex64;

/// Largest supported register width.
pub const MAX_QUBITS: usize = 16;

/// Pure state of `n` qubits; qubit `b` is bit `b` of the basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H,
    X,
    Z,
}

impl StateVector {
    /// |0...0> on `n` qubits.
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { n, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Self {
        assert!(amps.len().is_power_of_two() && amps.len() <= 1 << MAX_QUBITS);
        StateVector { n: amps.len().trailing_zeros() as usize, amps }
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `gate` on `target`, applied only where every control qubit is 1.
    pub fn apply(&mut self, gate: Gate, controls: &[usize], target: usize) {
        debug_assert!(target < self.n && controls.iter().all(|c| *c < self.n && *c != target));
        let cmask: usize = controls.iter().map(|c| 1 << c).sum();
        let t = 1 << target;
        match gate {
            Gate::Z => {
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & cmask == cmask && i & t != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::X => {
                for i in 0..self.amps.len() {
                    if i & cmask == cmask && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
            Gate::H => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for i in 0..self.amps.len() {
                    if i & cmask == cmask && i & t == 0 {
                        let (a, b) = (self.amps[i], self.amps[i | t]);
                        self.amps[i] = (a + b) * s;
                        self.amps[i | t] = (a - b) * s;
                    }
                }
            }
        }
        debug_assert!((self.norm_sqr() - 1.0).abs() < 1e-10, "norm drifted to {}", self.norm_sqr());
    }

    /// Outcome distribution of measuring `qubits` jointly; outcome bit `j`
    /// is the value of `qubits[j]`.
    pub fn distribution(&self, qubits: &[usize]) -> Vec<f64> {
        let mut p = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            p[extract(i, qubits)] += a.norm_sqr();
        }
        p
    }

    /// Projects onto `outcome` for `qubits` and renormalizes; returns the
    /// probability of that outcome before projection.
    pub fn collapse(&mut self, qubits: &[usize], outcome: usize) -> f64 {
        let p = self.distribution(qubits)[outcome];
        let scale = if p > 0.0 { 1.0 / p.sqrt() } else { 0.0 };
        for (i, a) in self.amps.iter_mut().enumerate() {
            if extract(i, qubits) == outcome {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        p
    }
}

fn extract(index: usize, qubits: &[usize]) -> usize {
    qubits.iter().enumerate().map(|(j, q)| ((index >> q) & 1) << j).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hadamard_splits_evenly() {
        let mut s = StateVector::new(1);
        s.apply(Gate::H, &[], 0);
        let d = s.distribution(&[0]);
        assert_abs_diff_eq!(d[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn controlled_x_is_cnot() {
        let mut s = StateVector::new(2);
        s.apply(Gate::X, &[], 0);
        s.apply(Gate::X, &[0], 1);
        assert_abs_diff_eq!(s.probabilities()[3], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn collapse_renormalizes() {
        let mut s = StateVector::new(2);
        s.apply(Gate::H, &[], 0);
        s.apply(Gate::H, &[], 1);
        let p = s.collapse(&[1], 1);
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.probabilities()[2], 0.5, epsilon = 1e-12);
    }
}
