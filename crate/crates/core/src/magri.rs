//! The Lenard-Magri scheme for a compatible pair of Hamiltonian operators.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::diffpoly::calculus::monomials_of;
use crate::diffpoly::{DiffMonomial, DiffPoly, DiffRing, LocalFunctional};
use crate::error::{Error, Result};
use crate::hamcoh::is_compatible;
use crate::linalg::LinearSystem;
use crate::matop::MatDiffOp;
use crate::rational::Rational;

/// `du/dt = H(∂) δh/δu`.
pub fn evolution_equation(h: &MatDiffOp, f: &LocalFunctional) -> Result<Vec<DiffPoly>> {
    let ring = DiffRing::new(h.rows())?;
    ring.check(f.representative())?;
    h.apply(&ring.variational_derivative(f.representative()))
}

/// Whether `∫ δg/δu · H(∂) δf/δu = 0`.
pub fn involution_check(h: &MatDiffOp, f: &LocalFunctional, g: &LocalFunctional) -> Result<bool> {
    let ring = DiffRing::new(h.rows())?;
    ring.check(g.representative())?;
    let flow = evolution_equation(h, f)?;
    let dg = ring.variational_derivative(g.representative());
    let mut density = DiffPoly::zero();
    for (a, b) in dg.iter().zip(&flow) {
        density += &(a * b);
    }
    Ok(LocalFunctional::new(density).is_zero())
}

/// Some `G` with `K(∂) G = F` for quasiconstant `K`, found by an exact solve on
/// polynomials of the degrees occurring in `F`, weight at most that of `F` and order
/// at most `order(F) + order(K)`.
pub fn solve_preimage(k: &MatDiffOp, f: &[DiffPoly]) -> Result<Option<Vec<DiffPoly>>> {
    let ks = crate::hamcoh::constant_symbol(k)?;
    let ell = k.rows();
    if f.len() != ell {
        return Err(Error::DimensionMismatch(format!("expected {ell} components, got {}", f.len())));
    }
    let big_n = ks.len() - 1;
    let max_order = f.iter().filter_map(DiffPoly::order).max().unwrap_or(0) + big_n;
    let mut blocks: BTreeSet<u32> = BTreeSet::new();
    let mut max_weight = 0;
    for fi in f {
        for (d, w) in fi.homogeneous_parts().into_keys() {
            blocks.insert(d);
            max_weight = max_weight.max(w);
        }
    }
    let mut g = vec![DiffPoly::zero(); ell];
    for d in blocks {
        let candidates: Vec<DiffMonomial> = (0..=max_weight).flat_map(|w| monomials_of(ell, max_order, d, w)).collect();
        let m = candidates.len();
        let mut sys: LinearSystem<(usize, DiffMonomial)> = LinearSystem::new(ell * m);
        for j in 0..ell {
            for (col, mono) in candidates.iter().enumerate() {
                let base = DiffPoly::term(Rational::from_integer(1.into()), mono.clone());
                for (n, kn) in ks.iter().enumerate() {
                    let image = base.total_derivative_n(n);
                    for i in 0..ell {
                        let c = &kn[(i, j)];
                        if c.is_zero() {
                            continue;
                        }
                        for (key, v) in image.terms() {
                            sys.add_coefficient((i, key.clone()), j * m + col, &(v * c));
                        }
                    }
                }
            }
        }
        for (i, fi) in f.iter().enumerate() {
            for (key, v) in fi.terms() {
                if key.degree() == d {
                    sys.add_rhs((i, key.clone()), v);
                }
            }
        }
        let Some(x) = sys.solve() else {
            return Ok(None);
        };
        for j in 0..ell {
            for (col, mono) in candidates.iter().enumerate() {
                g[j].add_term(mono.clone(), x[j * m + col].clone());
            }
        }
    }
    Ok(Some(g))
}

/// `∫h_{n+1}` with `K δh_{n+1}/δu = H δh_n/δu`, or `None` when either the preimage or
/// the integration step has no solution.
pub fn lenard_step(k: &MatDiffOp, h: &MatDiffOp, hn: &LocalFunctional) -> Result<Option<LocalFunctional>> {
    if !is_compatible(k, h)? {
        return Err(Error::Incompatible);
    }
    lenard_step_unchecked(k, h, hn)
}

fn lenard_step_unchecked(k: &MatDiffOp, h: &MatDiffOp, hn: &LocalFunctional) -> Result<Option<LocalFunctional>> {
    let ring = DiffRing::new(k.rows())?;
    let f = evolution_equation(h, hn)?;
    let Some(g) = solve_preimage(k, &f)? else {
        return Ok(None);
    };
    Ok(ring.homotopy_integrate(&g))
}

#[derive(Debug, Clone)]
pub struct HierarchyState {
    pub k: MatDiffOp,
    pub h: MatDiffOp,
    pub functionals: Vec<LocalFunctional>,
    /// `P_m = H(∂) δh_m/δu`.
    pub flows: Vec<Vec<DiffPoly>>,
    /// Set when a step had no solution; holds the index of the missing functional.
    pub obstructed_at: Option<usize>,
    pub involution_h: Vec<Vec<bool>>,
    pub involution_k: Vec<Vec<bool>>,
}

impl HierarchyState {
    pub fn all_in_involution(&self) -> bool {
        self.involution_h.iter().chain(&self.involution_k).flatten().all(|&b| b)
    }

    /// `K δh_{m+1} = H δh_m` for every consecutive pair.
    pub fn recursion_holds(&self) -> Result<bool> {
        let ring = DiffRing::new(self.k.rows())?;
        for (m, pair) in self.functionals.windows(2).enumerate() {
            let lhs = self.k.apply(&ring.variational_derivative(pair[1].representative()))?;
            if lhs != self.flows[m] {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Runs `steps` Lenard-Magri steps from a Casimir `seed` of `K`.
pub fn build_hierarchy(k: &MatDiffOp, h: &MatDiffOp, seed: &LocalFunctional, steps: usize) -> Result<HierarchyState> {
    if !is_compatible(k, h)? {
        return Err(Error::Incompatible);
    }
    let ring = DiffRing::new(k.rows())?;
    ring.check(seed.representative())?;
    let at_seed = k.apply(&ring.variational_derivative(seed.representative()))?;
    if !at_seed.iter().all(DiffPoly::is_zero) {
        return Err(Error::NotCasimir);
    }
    let mut functionals = vec![seed.clone()];
    let mut obstructed_at = None;
    for n in 0..steps {
        match lenard_step_unchecked(k, h, &functionals[n])? {
            Some(next) => functionals.push(next),
            None => {
                obstructed_at = Some(n + 1);
                break;
            }
        }
    }
    let flows = functionals.iter().map(|f| evolution_equation(h, f)).collect::<Result<Vec<_>>>()?;
    let matrix = |op: &MatDiffOp| -> Result<Vec<Vec<bool>>> {
        functionals
            .iter()
            .map(|f| functionals.iter().map(|g| involution_check(op, f, g)).collect())
            .collect()
    };
    let involution_h = matrix(h)?;
    let involution_k = matrix(k)?;
    Ok(HierarchyState {
        k: k.clone(),
        h: h.clone(),
        functionals,
        flows,
        obstructed_at,
        involution_h,
        involution_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matop::OpPoly;
    use crate::rational::{frac, int};

    fn u(order: usize) -> DiffPoly {
        DiffPoly::var(0, order)
    }

    fn d() -> MatDiffOp {
        MatDiffOp::from_rows(vec![vec![OpPoly::d()]]).unwrap()
    }

    fn kdv() -> MatDiffOp {
        let mut op = OpPoly::monomial(DiffPoly::one(), 3);
        op.add_coefficient(1, &u(0).scale(&int(2)));
        op.add_coefficient(0, &u(1));
        MatDiffOp::from_rows(vec![vec![op]]).unwrap()
    }

    fn half_u_squared() -> LocalFunctional {
        LocalFunctional::new(u(0).pow(2).scale(&frac(1, 2)))
    }

    fn second() -> LocalFunctional {
        LocalFunctional::new(&(&u(0) * &u(2)).scale(&frac(1, 2)) + &u(0).pow(3).scale(&frac(1, 2)))
    }

    #[test]
    fn evolution_examples() {
        assert_eq!(evolution_equation(&d(), &half_u_squared()).unwrap(), vec![u(1)]);
        assert_eq!(evolution_equation(&kdv(), &LocalFunctional::new(u(1))).unwrap(), vec![DiffPoly::zero()]);
        let expected = &u(3) + &(&u(0) * &u(1)).scale(&int(3));
        assert_eq!(evolution_equation(&kdv(), &half_u_squared()).unwrap(), vec![expected]);
    }

    #[test]
    fn involution_examples() {
        assert!(involution_check(&kdv(), &second(), &second()).unwrap());
        assert!(involution_check(&d(), &half_u_squared(), &second()).unwrap());
        let cube = LocalFunctional::new(u(0).pow(3).scale(&frac(1, 3)));
        assert!(!involution_check(&kdv(), &half_u_squared(), &cube).unwrap());
    }

    #[test]
    fn lenard_examples() {
        let h1 = lenard_step(&d(), &kdv(), &LocalFunctional::new(u(0))).unwrap().unwrap();
        assert_eq!(h1, half_u_squared());
        let h2 = lenard_step(&d(), &kdv(), &h1).unwrap().unwrap();
        assert_eq!(h2, second());
        let zero = lenard_step(&d(), &d(), &LocalFunctional::new(DiffPoly::one())).unwrap().unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn incompatible_pair_is_an_error() {
        let mut op = OpPoly::monomial(u(0).pow(2).scale(&int(2)), 1);
        op.add_coefficient(0, &(&u(0) * &u(1)).scale(&int(2)));
        let k = MatDiffOp::from_rows(vec![vec![op]]).unwrap();
        let h = MatDiffOp::from_rows(vec![vec![OpPoly::monomial(DiffPoly::one(), 3)]]).unwrap();
        assert!(crate::hamcoh::is_hamiltonian(&k).unwrap());
        assert!(matches!(lenard_step(&k, &h, &LocalFunctional::new(u(0))), Err(Error::Incompatible)));
    }

    #[test]
    fn kdv_hierarchy() {
        let state = build_hierarchy(&d(), &kdv(), &LocalFunctional::new(u(0)), 3).unwrap();
        assert_eq!(state.functionals.len(), 4);
        assert_eq!(state.obstructed_at, None);
        assert_eq!(state.functionals[1], half_u_squared());
        let expected = LocalFunctional::new(&u(0).pow(3).scale(&frac(1, 2)) - &u(1).pow(2).scale(&frac(1, 2)));
        assert_eq!(state.functionals[2], expected);
        assert!(state.all_in_involution());
        assert!(state.recursion_holds().unwrap());
    }

    #[test]
    fn trivial_seed_gives_zero_flows() {
        let state = build_hierarchy(&d(), &kdv(), &LocalFunctional::new(DiffPoly::one()), 3).unwrap();
        assert!(state.flows.iter().flatten().all(DiffPoly::is_zero));
        assert!(state.functionals[1..].iter().all(LocalFunctional::is_zero));
    }

    #[test]
    fn seed_must_be_casimir() {
        assert!(matches!(build_hierarchy(&d(), &kdv(), &half_u_squared(), 1), Err(Error::NotCasimir)));
    }

    #[test]
    fn preimage_choice_only_shifts_by_casimirs() {
        let ring = DiffRing::new(1).unwrap();
        let f = evolution_equation(&kdv(), &half_u_squared()).unwrap();
        let g = solve_preimage(&d(), &f).unwrap().unwrap();
        let base = ring.homotopy_integrate(&g).unwrap();
        for c in [int(1), frac(-7, 3)] {
            let shifted = vec![&g[0] + &DiffPoly::constant(c.clone())];
            assert_eq!(d().apply(&shifted).unwrap(), f);
            let other = ring.homotopy_integrate(&shifted).unwrap();
            let diff = LocalFunctional::new(other.representative() - base.representative());
            let at = d().apply(&ring.variational_derivative(diff.representative())).unwrap();
            assert!(at.iter().all(DiffPoly::is_zero));
        }
    }
}
