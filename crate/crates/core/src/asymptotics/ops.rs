//! Linear differential operators with Laurent-polynomial coefficients.

use super::laurent::{qi, Laurent};

/// Function spaces the operators act on.
pub trait Differentiable: Clone {
    fn zero() -> Self;
    fn derivative(&self) -> Self;
    fn mul_laurent(&self, c: &Laurent) -> Self;
    fn add(&self, o: &Self) -> Self;
}

/// `Σ_k c_k(t) ∂^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOp {
    c: Vec<Laurent>,
}

fn binom(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
}

impl DiffOp {
    /// From `(coefficient, derivative order)` pairs.
    pub fn new(terms: &[(Laurent, usize)]) -> Self {
        let n = terms.iter().map(|(_, k)| k + 1).max().unwrap_or(0);
        let mut c = vec![Laurent::zero(); n];
        for (p, k) in terms {
            c[*k] = c[*k].add(p);
        }
        DiffOp { c }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.c.last().is_some_and(|p| p.is_zero()) {
            self.c.pop();
        }
        self
    }

    pub fn order(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Laurent {
        self.c.get(k).cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &DiffOp) -> DiffOp {
        let n = self.c.len().max(o.c.len());
        DiffOp {
            c: (0..n).map(|k| self.coeff(k).add(&o.coeff(k))).collect(),
        }
        .trimmed()
    }

    pub fn scale(&self, s: &Laurent) -> DiffOp {
        DiffOp {
            c: self.c.iter().map(|p| p.mul(s)).collect(),
        }
        .trimmed()
    }

    /// `self ∘ o`, by the Leibniz rule.
    pub fn compose(&self, o: &DiffOp) -> DiffOp {
        let mut out = DiffOp { c: vec![] };
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                let mut br = b.clone();
                for r in 0..=i {
                    if br.is_zero() {
                        break;
                    }
                    let coef = a.mul(&br).scale(&qi(binom(i, r)));
                    let mut terms = vec![Laurent::zero(); i - r + j + 1];
                    terms[i - r + j] = coef;
                    out = out.add(&DiffOp { c: terms });
                    br = br.derivative();
                }
            }
        }
        out.trimmed()
    }

    pub fn apply<F: Differentiable>(&self, f: &F) -> F {
        let mut acc = F::zero();
        let mut d = f.clone();
        for (k, c) in self.c.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&d.mul_laurent(c));
            }
            if k + 1 < self.c.len() {
                d = d.derivative();
            }
        }
        acc
    }
}

/// `c · t^k` with integer `c`.
pub fn mono(c: i64, k: i32) -> Laurent {
    Laurent::monomial(qi(c), k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_follows_leibniz() {
        // ∂ ∘ t = t∂ + 1
        let d = DiffOp::new(&[(mono(1, 0), 1)]);
        let t = DiffOp::new(&[(mono(1, 1), 0)]);
        assert_eq!(d.compose(&t), DiffOp::new(&[(mono(1, 1), 1), (mono(1, 0), 0)]));
        assert_eq!(t.compose(&d), DiffOp::new(&[(mono(1, 1), 1)]));
    }
}
