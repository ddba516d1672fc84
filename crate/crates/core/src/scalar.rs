//! Polynomial test functions with analytic gradients.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub dim: usize,
    /// `(coefficient, exponent per coordinate)`.
    pub terms: Vec<(f64, Vec<u32>)>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Polynomial { dim, terms: vec![(c, vec![0; dim])] }
    }

    pub fn monomial(dim: usize, c: f64, exps: &[u32]) -> Self {
        assert_eq!(exps.len(), dim);
        Polynomial { dim, terms: vec![(c, exps.to_vec())] }
    }

    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Polynomial { dim, terms: vec![(1.0, e)] }
    }

    pub fn add(mut self, other: &Polynomial) -> Self {
        assert_eq!(self.dim, other.dim);
        self.terms.extend(other.terms.iter().cloned());
        self
    }

    pub fn scale(mut self, c: f64) -> Self {
        for t in &mut self.terms {
            t.0 *= c;
        }
        self
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, e)| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for (c, e) in &self.terms {
            for i in 0..self.dim {
                if e[i] == 0 {
                    continue;
                }
                let mut v = c * e[i] as f64;
                for (j, (&k, &xj)) in e.iter().zip(x).enumerate() {
                    let k = if j == i { k - 1 } else { k };
                    v *= xj.powi(k as i32);
                }
                g[i] += v;
            }
        }
        g
    }

    /// Monomials of total degree 1 and 2 plus the sum of squares of the first two coordinates.
    pub fn library(dim: usize) -> Vec<(String, Polynomial)> {
        let names = ["x", "y", "t", "s"];
        let name = |i: usize| if dim == 4 { ["a", "b", "c", "d"][i] } else { names[i] };
        let mut out = Vec::new();
        for i in 0..dim {
            out.push((name(i).to_string(), Polynomial::coordinate(dim, i)));
        }
        for i in 0..dim {
            for j in i..dim {
                let mut e = vec![0; dim];
                e[i] += 1;
                e[j] += 1;
                let label = if i == j { format!("{}^2", name(i)) } else { format!("{}{}", name(i), name(j)) };
                out.push((label, Polynomial::monomial(dim, 1.0, &e)));
            }
        }
        if dim >= 2 {
            let mut ex = vec![0; dim];
            ex[0] = 2;
            let mut ey = vec![0; dim];
            ey[1] = 2;
            let r2 = Polynomial::monomial(dim, 1.0, &ex).add(&Polynomial::monomial(dim, 1.0, &ey));
            out.push((format!("{0}^2+{1}^2", name(0), name(1)), r2));
        }
        out
    }
}
