use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_traits::{One, Zero};

use crate::diffpoly::{DiffPoly, DiffVar};
use crate::rational::{fmt_rational, Rational};

/// A polynomial in `λ_0, ..., λ_{n-1}` with coefficients in `V`.
///
/// Coefficients sit to the left of the λ-monomial; operators of the form
/// `λ + ∂` act on them through [`LambdaPoly::shift_apply`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LambdaPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, DiffPoly>,
}

impl LambdaPoly {
    pub fn zero(nvars: usize) -> Self {
        LambdaPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: DiffPoly) -> Self {
        LambdaPoly::monomial(vec![0; nvars], c)
    }

    pub fn monomial(exps: Vec<u32>, c: DiffPoly) -> Self {
        let mut p = LambdaPoly::zero(exps.len());
        p.add_term(exps, &c);
        p
    }

    /// `λ_t` in `nvars` variables.
    pub fn var(nvars: usize, t: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[t] = 1;
        LambdaPoly::monomial(exps, DiffPoly::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: &DiffPoly) {
        assert_eq!(exps.len(), self.nvars, "exponent length must match variable count");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &DiffPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> DiffPoly {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of `λ^0`, or zero.
    pub fn constant_coefficient(&self) -> DiffPoly {
        self.coefficient(&vec![0; self.nvars])
    }

    pub fn degree_in(&self, t: usize) -> u32 {
        self.terms.keys().map(|e| e[t]).max().unwrap_or(0)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().flat_map(|e| e.iter().copied()).max().unwrap_or(0)
    }

    pub fn coefficient_order(&self) -> Option<usize> {
        self.terms.values().filter_map(DiffPoly::order).max()
    }

    pub fn index_bound(&self) -> usize {
        self.terms.values().map(DiffPoly::index_bound).max().unwrap_or(0)
    }

    pub fn is_quasiconstant(&self) -> bool {
        self.terms.values().all(DiffPoly::is_constant)
    }

    pub fn scale(&self, c: &Rational) -> LambdaPoly {
        self.map_coefficients(|p| p.scale(c))
    }

    pub fn map_coefficients(&self, mut f: impl FnMut(&DiffPoly) -> DiffPoly) -> LambdaPoly {
        let mut out = LambdaPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &f(c));
        }
        out
    }

    /// `f · self`.
    pub fn mul_left(&self, f: &DiffPoly) -> LambdaPoly {
        self.map_coefficients(|c| f * c)
    }

    /// Multiplication by `λ^exps`.
    pub fn mul_lambda(&self, exps: &[u32]) -> LambdaPoly {
        LambdaPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(exps).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn mul_var(&self, t: usize) -> LambdaPoly {
        let mut exps = vec![0; self.nvars];
        exps[t] = 1;
        self.mul_lambda(&exps)
    }

    /// `∂` applied to every coefficient.
    pub fn d_coefficients(&self) -> LambdaPoly {
        self.map_coefficients(DiffPoly::total_derivative)
    }

    pub fn partial(&self, v: DiffVar) -> LambdaPoly {
        self.map_coefficients(|c| c.partial(v))
    }

    /// `(Σ_{t ∈ vars} λ_t + ∂) self`, negated when `negate` is set.
    pub fn shift_apply(&self, vars: &[usize], negate: bool) -> LambdaPoly {
        let mut out = self.d_coefficients();
        for &t in vars {
            out += &self.mul_var(t);
        }
        if negate {
            -out
        } else {
            out
        }
    }

    /// `(±(Σ_{t ∈ vars} λ_t + ∂))^n self`.
    pub fn shift_apply_n(&self, vars: &[usize], negate: bool, n: usize) -> LambdaPoly {
        let mut out = self.clone();
        for _ in 0..n {
            out = out.shift_apply(vars, negate);
        }
        out
    }

    /// Moves variable `t` to position `map[t]` of a polynomial in `nvars` variables.
    pub fn rename(&self, nvars: usize, map: &[usize]) -> LambdaPoly {
        assert_eq!(map.len(), self.nvars, "rename map must cover every variable");
        let mut out = LambdaPoly::zero(nvars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; nvars];
            for (t, &a) in e.iter().enumerate() {
                ne[map[t]] += a;
            }
            out.add_term(ne, c);
        }
        out
    }

    /// Eliminates the last variable via `λ_last = -λ_0 - ... - λ_{last-1} - ∂`,
    /// with `∂` acting on the coefficient.
    pub fn eliminate_last(&self) -> LambdaPoly {
        if self.nvars == 0 {
            return self.clone();
        }
        let m = self.nvars - 1;
        let rest: Vec<usize> = (0..m).collect();
        let mut out = LambdaPoly::zero(m);
        for (e, c) in &self.terms {
            let powered = LambdaPoly::constant(m, c.clone()).shift_apply_n(&rest, true, e[m] as usize);
            out += &powered.mul_lambda(&e[..m]);
        }
        out
    }

    /// Replaces `λ_t` by `values[t]` and sums: only meaningful for quasiconstant
    /// coefficients, where `∂` acts trivially.
    pub fn evaluate_constant(&self, values: &[Rational]) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let c = c.as_constant()?;
            let mut term = c;
            for (a, v) in e.iter().zip(values) {
                for _ in 0..*a {
                    term *= v;
                }
            }
            acc += term;
        }
        Some(acc)
    }
}

impl AddAssign<&LambdaPoly> for LambdaPoly {
    fn add_assign(&mut self, rhs: &LambdaPoly) {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), c);
        }
    }
}

impl Add<&LambdaPoly> for &LambdaPoly {
    type Output = LambdaPoly;
    fn add(self, rhs: &LambdaPoly) -> LambdaPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&LambdaPoly> for &LambdaPoly {
    type Output = LambdaPoly;
    fn sub(self, rhs: &LambdaPoly) -> LambdaPoly {
        let mut out = self.clone();
        out += &(-rhs);
        out
    }
}

impl Neg for &LambdaPoly {
    type Output = LambdaPoly;
    fn neg(self) -> LambdaPoly {
        LambdaPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Neg for LambdaPoly {
    type Output = LambdaPoly;
    fn neg(self) -> LambdaPoly {
        -&self
    }
}

impl fmt::Display for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let lambda: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(t, &a)| if a == 1 { format!("l{t}") } else { format!("l{t}^{a}") })
                .collect();
            for (mono, q) in c.terms() {
                let negative = q < &Rational::zero();
                let abs = if negative { -q } else { q.clone() };
                if first {
                    if negative {
                        write!(f, "-")?;
                    }
                } else {
                    write!(f, " {} ", if negative { "-" } else { "+" })?;
                }
                first = false;
                let mut factors: Vec<String> = Vec::new();
                if !abs.is_one() || (mono.is_one() && lambda.is_empty()) {
                    factors.push(fmt_rational(&abs));
                }
                if !mono.is_one() {
                    factors.push(mono.to_string());
                }
                factors.extend(lambda.iter().cloned());
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}
