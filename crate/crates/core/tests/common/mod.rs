//! Seeded generators and property checks shared by the integration suites and the
//! acceptance runner.

#![allow(dead_code)]

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use varpois::diffpoly::{DiffMonomial, DiffVar};
use varpois::expr::{parse_expr, print_expr};
use varpois::hamcoh::{
    a_space_basis_sd, casimir_basis, cohomology_dimensions, delta_k, gram_on_kernel, inner_product, is_essential,
};
use varpois::magri::build_hierarchy;
use varpois::polyvec::{
    bracket_functional, bracket_op_functional, bracket_vf_functional, bracket_vf_op, schouten, triple_bracket,
};
use varpois::rational::{binomial_u, frac, int, tuples};
use varpois::superlie::{full_prolongation, htilde_dims, iso_check_translation_case, so_basis};
use varpois::{DiffPoly, DiffRing, LambdaPoly, LocalFunctional, MatDiffOp, OpPoly, PolyVector, QMatrix, Rational};

pub type Check = Result<String, String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small(rng: &mut ChaCha8Rng) -> Rational {
    let n = rng.gen_range(-3i64..=3);
    let d = rng.gen_range(1i64..=2);
    frac(if n == 0 { 1 } else { n }, d)
}

/// A few monomials of degree at most `max_degree` in `u_1..u_ell` of order at most `max_order`.
pub fn poly(rng: &mut ChaCha8Rng, ell: usize, max_order: usize, max_degree: u32, terms: usize) -> DiffPoly {
    let mut p = DiffPoly::zero();
    for _ in 0..rng.gen_range(1..=terms) {
        let deg = rng.gen_range(0..=max_degree);
        let m = DiffMonomial::from_factors(
            (0..deg).map(|_| (DiffVar::new(rng.gen_range(0..ell), rng.gen_range(0..=max_order)), 1)),
        );
        p.add_term(m, small(rng));
    }
    p
}

pub fn vector(rng: &mut ChaCha8Rng, ell: usize, max_order: usize, max_degree: u32) -> Vec<DiffPoly> {
    (0..ell).map(|_| poly(rng, ell, max_order, max_degree, 2)).collect()
}

pub fn functional(rng: &mut ChaCha8Rng, ell: usize, max_order: usize) -> LocalFunctional {
    LocalFunctional::new(poly(rng, ell, max_order, 3, 3))
}

/// A random skewsymmetric array of degree `k`, coefficient order at most `max_order`.
pub fn polyvector(rng: &mut ChaCha8Rng, ell: usize, k: i32, max_order: usize) -> PolyVector {
    match k {
        -1 => PolyVector::from_functional(ell, &functional(rng, ell, max_order)),
        0 => PolyVector::from_vector(&vector(rng, ell, max_order, 2)),
        _ => {
            let nv = (k + 1) as usize;
            let mut raw = Vec::new();
            let all = tuples(ell, nv);
            for _ in 0..rng.gen_range(1..=2) {
                let t = all.choose(rng).unwrap().clone();
                let mut exps = vec![0u32; nv];
                if rng.gen_bool(0.6) {
                    exps[rng.gen_range(0..nv)] = 1;
                }
                raw.push((t, LambdaPoly::monomial(exps, poly(rng, ell, max_order, 2, 2))));
            }
            PolyVector::from_raw(ell, k, raw).skewsymmetrize()
        }
    }
}

pub fn operator(rng: &mut ChaCha8Rng, ell: usize, order: usize, coeff_order: usize, coeff_degree: u32) -> MatDiffOp {
    let rows = (0..ell)
        .map(|_| {
            (0..ell)
                .map(|_| {
                    let mut coeffs = Vec::new();
                    for n in 0..=order {
                        if rng.gen_bool(0.6) {
                            coeffs.push((n, poly(rng, ell, coeff_order, coeff_degree, 2)));
                        }
                    }
                    OpPoly::from_coefficients(coeffs)
                })
                .collect()
        })
        .collect();
    MatDiffOp::from_rows(rows).unwrap()
}

/// `A - A*` for a random `A`.
pub fn skew_operator(rng: &mut ChaCha8Rng, ell: usize, order: usize, coeff_order: usize) -> MatDiffOp {
    let a = operator(rng, ell, order, coeff_order, 1);
    &a - &a.adjoint()
}

pub fn constant_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> QMatrix {
    QMatrix::from_rows(
        (0..rows)
            .map(|_| (0..cols).map(|_| if rng.gen_bool(0.3) { int(0) } else { small(rng) }).collect())
            .collect(),
    )
}

pub fn symmetric_nondegenerate(rng: &mut ChaCha8Rng, n: usize) -> QMatrix {
    loop {
        let a = constant_matrix(rng, n, n);
        let s = a.add(&a.transpose());
        if s.is_invertible() {
            return s;
        }
    }
}

pub fn invertible(rng: &mut ChaCha8Rng, n: usize) -> QMatrix {
    loop {
        let a = constant_matrix(rng, n, n);
        if a.is_invertible() {
            return a;
        }
    }
}

/// `P^T diag(0, 1, ..., 1) P` for random invertible `P`.
pub fn symmetric_corank_one(rng: &mut ChaCha8Rng, n: usize) -> QMatrix {
    let p = invertible(rng, n);
    let mut d = QMatrix::identity(n);
    d[(0, 0)] = int(0);
    p.transpose().mul(&d).mul(&p)
}

pub fn sd(s: &QMatrix) -> MatDiffOp {
    let n = s.rows();
    MatDiffOp::from_constant_coefficients(&[QMatrix::zeros(n, n), s.clone()]).unwrap()
}

pub fn d_op() -> MatDiffOp {
    MatDiffOp::scalar(OpPoly::d())
}

pub fn kdv() -> MatDiffOp {
    MatDiffOp::scalar(OpPoly::from_coefficients([
        (3, DiffPoly::one()),
        (1, DiffPoly::var(0, 0).scale(&int(2))),
        (0, DiffPoly::var(0, 1)),
    ]))
}

/// Skewadjoint constant operator `Σ K_n D^n` of odd order `n_max` with invertible
/// leading coefficient: odd coefficients symmetric, even ones skew.
pub fn constant_skew_operator(rng: &mut ChaCha8Rng, ell: usize, n_max: usize) -> MatDiffOp {
    let mats: Vec<QMatrix> = (0..=n_max)
        .map(|n| {
            if n == n_max {
                return symmetric_nondegenerate(rng, ell);
            }
            let a = constant_matrix(rng, ell, ell);
            let a = if rng.gen_bool(0.4) { QMatrix::zeros(ell, ell) } else { a };
            if n % 2 == 1 {
                a.add(&a.transpose())
            } else {
                a.add(&a.transpose().scale(&int(-1)))
            }
        })
        .collect();
    MatDiffOp::from_constant_coefficients(&mats).unwrap()
}

pub fn quasiconstant(rng: &mut ChaCha8Rng, ell: usize, n_max: usize) -> MatDiffOp {
    let mats: Vec<QMatrix> = (0..=n_max).map(|_| constant_matrix(rng, ell, ell)).collect();
    MatDiffOp::from_constant_coefficients(&mats).unwrap()
}

fn sign(h: i32, q: i32) -> Rational {
    if h.rem_euclid(2) * q.rem_euclid(2) == 1 {
        int(-1)
    } else {
        int(1)
    }
}

fn within(start: Instant, secs: u64, what: &str) -> Result<(), String> {
    let t = start.elapsed().as_secs_f64();
    if t > secs as f64 {
        return Err(format!("{what} took {t:.1}s, limit {secs}s"));
    }
    Ok(())
}

pub fn dimension_theorem(seed: u64) -> Check {
    let mut r = rng(seed);
    let mut cases = 0;
    for ell in 1..=3usize {
        for _ in 0..3 {
            let s = symmetric_nondegenerate(&mut r, ell);
            let start = Instant::now();
            let report = cohomology_dimensions(&sd(&s), ell as i32).map_err(|e| e.to_string())?;
            for e in &report.entries {
                let expected = binomial_u(ell + 1, (e.degree + 2) as usize) as usize;
                if e.dimension != expected {
                    return Err(format!("S = {s:?}: dim H^{} = {}, expected {expected}", e.degree, e.dimension));
                }
            }
            within(start, 10, "cohomology case")?;
            cases += 1;
        }
    }
    Ok(format!("{cases} cases"))
}

pub fn strict_bounds(seed: u64) -> Check {
    let d3 = MatDiffOp::scalar(OpPoly::monomial(DiffPoly::one(), 3));
    let start = Instant::now();
    let rep = cohomology_dimensions(&d3, 0).map_err(|e| e.to_string())?;
    let got: Vec<(usize, u128)> = rep.entries.iter().map(|e| (e.dimension, e.bound)).collect();
    if got != vec![(2, 4), (2, 6)] || rep.entries.iter().any(|e| e.bound_attained) {
        return Err(format!("D^3: {got:?}"));
    }
    let mut r = rng(seed);
    for ell in 1..=3usize {
        let s = symmetric_nondegenerate(&mut r, ell);
        let rep = cohomology_dimensions(&sd(&s), ell as i32).map_err(|e| e.to_string())?;
        if !rep.all_bounds_attained() {
            return Err(format!("S·D with S = {s:?} misses a bound"));
        }
    }
    within(start, 10, "strict bounds")?;
    Ok("D^3 strict, S·D attained".into())
}

pub fn superalgebra_dimensions(seed: u64) -> Check {
    let start = Instant::now();
    for n in 1..=8usize {
        let d = htilde_dims(n);
        let expected: Vec<usize> = (0..n).map(|k| binomial_u(n, k + 1) as usize).collect();
        if d != expected || d.iter().sum::<usize>() != (1 << n) - 1 {
            return Err(format!("H̃({n}) dims {d:?}"));
        }
    }
    let mut r = rng(seed);
    for n in 2..=5usize {
        for s in [symmetric_nondegenerate(&mut r, n), symmetric_corank_one(&mut r, n)] {
            let g = so_basis(&s).map_err(|e| e.to_string())?;
            let p = full_prolongation(n, &g, n as i32 - 1).map_err(|e| e.to_string())?;
            let mut expected: Vec<usize> = (0..n).map(|k| binomial_u(n, k + 1) as usize).collect();
            expected.push(0);
            if p.dims() != expected {
                return Err(format!("prolongation of so({n}, S), rank {}: {:?}", s.rank(), p.dims()));
            }
        }
    }
    within(start, 30, "superalgebra dimensions")?;
    Ok("n ≤ 8 and prolongations n ≤ 5".into())
}

pub fn isomorphism_instances() -> Check {
    let start = Instant::now();
    let cases = [
        QMatrix::identity(1),
        QMatrix::identity(2),
        QMatrix::diagonal(&[int(1), int(2)]),
        QMatrix::identity(3),
    ];
    for s in &cases {
        let rep = iso_check_translation_case(s).map_err(|e| e.to_string())?;
        if !rep.isomorphic {
            return Err(format!("no isomorphism for S = {s:?}"));
        }
    }
    within(start, 60, "isomorphism")?;
    Ok(format!("{} cases", cases.len()))
}

pub fn skew_and_jacobi(seed: u64, triples: usize) -> Check {
    let mut r = rng(seed);
    let degrees: Vec<(i32, i32, i32)> = (-1..=2)
        .flat_map(|a| (-1..=2).flat_map(move |b| (-1..=2).map(move |c| (a, b, c))))
        .filter(|&(a, b, c)| a + b + c <= 3 && a + b + c >= -1)
        .collect();
    for i in 0..triples {
        let ell = r.gen_range(1..=2);
        let (h, q, k) = *degrees.choose(&mut r).unwrap();
        let p = polyvector(&mut r, ell, h, 2);
        let qq = polyvector(&mut r, ell, q, 2);
        let rr = polyvector(&mut r, ell, k, 2);
        let lhs = schouten(&p, &qq);
        let rhs = schouten(&qq, &p).scale(&sign(h, q)).neg();
        if lhs != rhs {
            return Err(format!("skew symmetry fails on triple {i} (degrees {h}, {q})"));
        }
        let left = schouten(&p, &schouten(&qq, &rr));
        let right = schouten(&schouten(&p, &qq), &rr).add(&schouten(&qq, &schouten(&p, &rr)).scale(&sign(h, q)));
        if left != right {
            return Err(format!("Jacobi fails on triple {i} (degrees {h}, {q}, {k}, ell {ell})"));
        }
    }
    Ok(format!("{triples} triples"))
}

pub fn specialized_brackets(seed: u64, instances: usize) -> Check {
    let mut r = rng(seed);
    for i in 0..instances {
        let ell = r.gen_range(1..=2);
        let hf = functional(&mut r, ell, 2);
        let hp = PolyVector::from_functional(ell, &hf);
        let k = r.gen_range(0..=2);
        let q = polyvector(&mut r, ell, k, 2);
        if schouten(&q, &hp) != bracket_functional(&q, &hf).map_err(|e| e.to_string())? {
            return Err(format!("bracket_functional, instance {i}"));
        }
        let p = vector(&mut r, ell, 2, 2);
        let pv = PolyVector::from_vector(&p);
        let generic = schouten(&pv, &hp).to_functional().map_err(|e| e.to_string())?;
        if generic != bracket_vf_functional(&p, &hf).map_err(|e| e.to_string())? {
            return Err(format!("bracket_vf_functional, instance {i}"));
        }
        let op = skew_operator(&mut r, ell, 2, 1);
        let opv = PolyVector::from_operator(&op).map_err(|e| e.to_string())?;
        let generic = schouten(&opv, &hp).to_vector().map_err(|e| e.to_string())?;
        if generic != bracket_op_functional(&op, &hf).map_err(|e| e.to_string())? {
            return Err(format!("bracket_op_functional, instance {i}"));
        }
        let generic = schouten(&pv, &opv).to_operator().map_err(|e| e.to_string())?;
        if generic != bracket_vf_op(&p, &op).map_err(|e| e.to_string())? {
            return Err(format!("bracket_vf_op, instance {i}"));
        }
        let op2 = skew_operator(&mut r, ell, 2, 1);
        let opv2 = PolyVector::from_operator(&op2).map_err(|e| e.to_string())?;
        if schouten(&opv, &opv2) != triple_bracket(&op, &op2).map_err(|e| e.to_string())? {
            return Err(format!("triple_bracket, instance {i}"));
        }
    }
    Ok(format!("5 formulas x {instances} instances"))
}

pub fn delta_squared(seed: u64, operators: usize) -> Check {
    let mut r = rng(seed);
    let mut non_skew = 0;
    for i in 0..operators {
        let ell = r.gen_range(1..=2);
        let n_max = r.gen_range(1..=3);
        let k = if i % 3 == 0 {
            constant_skew_operator(&mut r, ell, n_max | 1)
        } else {
            quasiconstant(&mut r, ell, n_max)
        };
        if !k.is_skewadjoint().unwrap() {
            non_skew += 1;
        }
        for deg in -1..=2 {
            let p = polyvector(&mut r, ell, deg, 2);
            let once = delta_k(&k, &p).map_err(|e| e.to_string())?;
            let twice = delta_k(&k, &once).map_err(|e| e.to_string())?;
            if !twice.is_zero() {
                return Err(format!("δ_K² ≠ 0 for operator {i}, degree {deg}"));
            }
        }
    }
    Ok(format!("{operators} operators ({non_skew} not skewadjoint), degrees -1..2"))
}

/// `P` of order at most two with `K P + P* K = 0`, as a random combination of a basis.
fn intertwiner(rng: &mut ChaCha8Rng, k: &MatDiffOp) -> MatDiffOp {
    let ell = k.rows();
    let mut basis = Vec::new();
    for n in 0..=2 {
        for a in 0..ell {
            for b in 0..ell {
                let mut mats = vec![QMatrix::zeros(ell, ell); n + 1];
                mats[n][(a, b)] = int(1);
                basis.push(MatDiffOp::from_constant_coefficients(&mats).unwrap());
            }
        }
    }
    let images: Vec<MatDiffOp> = basis
        .iter()
        .map(|e| &k.compose(e).unwrap() + &e.adjoint().compose(k).unwrap())
        .collect();
    let top = images.iter().filter_map(MatDiffOp::order).max().unwrap_or(0);
    let columns: Vec<Vec<Rational>> = images
        .iter()
        .map(|img| {
            (0..=top)
                .flat_map(|n| {
                    let m = img.coefficient_matrix(n).unwrap();
                    (0..ell * ell).map(move |x| m[(x / ell, x % ell)].clone())
                })
                .collect()
        })
        .collect();
    let null = QMatrix::from_rows(columns).transpose().nullspace();
    let mut p = MatDiffOp::zero(ell, ell);
    for v in &null {
        let c = small(rng);
        for (coef, e) in v.iter().zip(&basis) {
            p = &p + &e.scale(&(coef * &c));
        }
    }
    p
}

pub fn inner_product_lemmas(seed: u64, instances: usize) -> Check {
    let mut r = rng(seed);
    let mut nontrivial = 0;
    for i in 0..instances {
        let ell = r.gen_range(1..=2);
        let n_max = r.gen_range(1..=3);
        let k = quasiconstant(&mut r, ell, n_max);
        let f = vector(&mut r, ell, 2, 2);
        let g = vector(&mut r, ell, 2, 2);
        let lhs = inner_product(&k, &f, &g).map_err(|e| e.to_string())?.total_derivative();
        let kg = k.apply(&g).unwrap();
        let ksf = k.adjoint().apply(&f).unwrap();
        let mut rhs = DiffPoly::zero();
        for j in 0..ell {
            rhs += &(&f[j] * &kg[j]);
            rhs -= &(&g[j] * &ksf[j]);
        }
        if lhs != rhs {
            return Err(format!("derivative identity, instance {i}"));
        }
        let n_max = 2 * r.gen_range(0..=1) + 1;
        let skew = constant_skew_operator(&mut r, ell, n_max);
        let fg = inner_product(&skew, &f, &g).unwrap();
        let gf = inner_product(&skew, &g, &f).unwrap();
        if fg != gf {
            return Err(format!("symmetry for skewadjoint K, instance {i}"));
        }
        let kernel = skew.coefficient_matrix(0).unwrap().nullspace();
        let p = intertwiner(&mut r, &skew);
        if !p.is_zero() {
            nontrivial += 1;
        }
        let constant = |rng: &mut ChaCha8Rng| -> Vec<DiffPoly> {
            let mut v = vec![int(0); ell];
            for b in &kernel {
                let c = small(rng);
                for (x, y) in v.iter_mut().zip(b) {
                    *x += y * &c;
                }
            }
            v.into_iter().map(DiffPoly::constant).collect()
        };
        let (f0, g0) = (constant(&mut r), constant(&mut r));
        let a = inner_product(&skew, &p.apply(&f0).unwrap(), &g0).unwrap();
        let b = inner_product(&skew, &f0, &p.apply(&g0).unwrap()).unwrap();
        if !(&a + &b).is_zero() {
            return Err(format!("invariance, instance {i}"));
        }
    }
    for _ in 0..5 {
        let ell = r.gen_range(1..=3);
        let s = symmetric_nondegenerate(&mut r, ell);
        let gram = gram_on_kernel(&sd(&s)).map_err(|e| e.to_string())?;
        if gram.gram != s {
            return Err(format!("Gram matrix for S = {s:?}"));
        }
    }
    Ok(format!("3 lemmas x {instances} instances ({nontrivial} nonzero P), Gram = S"))
}

pub fn essential_vanishing(seed: u64) -> Check {
    let mut r = rng(seed);
    let mut checked = 0;
    for ell in 1..=3usize {
        let s = symmetric_nondegenerate(&mut r, ell);
        let k = sd(&s);
        for degree in -1..(ell as i32) {
            for b in a_space_basis_sd(&s, degree).map_err(|e| e.to_string())? {
                if b.is_zero() {
                    continue;
                }
                if is_essential(&k, &b).map_err(|e| e.to_string())? {
                    return Err(format!("basis element of degree {degree} is essential (ell {ell})"));
                }
                checked += 1;
            }
        }
        for degree in -1..=1 {
            let q = polyvector(&mut r, ell, degree, 1);
            let exact = delta_k(&k, &q).map_err(|e| e.to_string())?;
            if !is_essential(&k, &exact).map_err(|e| e.to_string())? {
                return Err(format!("exact element of degree {} is not essential", degree + 1));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} elements"))
}

pub fn lenard_magri() -> Check {
    let start = Instant::now();
    let seed = LocalFunctional::new(DiffPoly::var(0, 0));
    let state = build_hierarchy(&d_op(), &kdv(), &seed, 3).map_err(|e| e.to_string())?;
    if state.functionals.len() != 4 {
        return Err(format!("{} functionals", state.functionals.len()));
    }
    if !state.recursion_holds().map_err(|e| e.to_string())? {
        return Err("recursion witness fails".into());
    }
    if !state.all_in_involution() {
        return Err("involution matrix has a false entry".into());
    }
    within(start, 30, "hierarchy")?;
    Ok("4 functionals, all in involution".into())
}

pub fn casimir_formula(seed: u64, operators: usize) -> Check {
    let mut r = rng(seed);
    let mut ranks = Vec::new();
    for i in 0..operators {
        let ell = r.gen_range(1..=3);
        let n_max = 2 * r.gen_range(0..=1) + 1;
        let k = constant_skew_operator(&mut r, ell, n_max);
        let k0 = k.coefficient_matrix(0).unwrap();
        let expected = 1 + ell - k0.rank();
        let report = cohomology_dimensions(&k, -1).map_err(|e| e.to_string())?;
        let casimirs = casimir_basis(&k).map_err(|e| e.to_string())?;
        if report.dimensions()[0] != expected || casimirs.len() != expected {
            return Err(format!(
                "operator {i}: dim H^-1 = {}, casimirs {}, expected {expected}",
                report.dimensions()[0],
                casimirs.len()
            ));
        }
        let ring = DiffRing::new(ell).unwrap();
        for c in &casimirs {
            let at = k.apply(&ring.variational_derivative(c.representative())).unwrap();
            if !at.iter().all(DiffPoly::is_zero) {
                return Err(format!("operator {i}: {c} is not central"));
            }
        }
        ranks.push(k0.rank());
    }
    Ok(format!("{operators} operators, rank K_0 in {:?}", {
        ranks.sort();
        ranks.dedup();
        ranks
    }))
}

fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> String {
    let atom = |rng: &mut ChaCha8Rng| -> String {
        match rng.gen_range(0..4) {
            0 => {
                let n = rng.gen_range(0..20);
                if rng.gen_bool(0.3) {
                    format!("{n}/{}", rng.gen_range(1..5))
                } else {
                    n.to_string()
                }
            }
            1 => format!("u{}_{}", rng.gen_range(1..4), rng.gen_range(0..6)),
            _ => format!("u{}{}", rng.gen_range(1..4), "'".repeat(rng.gen_range(0..4))),
        }
    };
    if depth == 0 {
        return atom(rng);
    }
    match rng.gen_range(0..5) {
        0 => format!("{} + {}", random_expr(rng, depth - 1), random_expr(rng, depth - 1)),
        1 => format!("{} - {}", random_expr(rng, depth - 1), random_expr(rng, depth - 1)),
        2 => format!("{}*{}", random_expr(rng, depth - 1), random_expr(rng, depth - 1)),
        3 => format!("({})^{}", random_expr(rng, depth - 1), rng.gen_range(0..3)),
        _ => format!("(-{})", random_expr(rng, depth - 1)),
    }
}

pub fn parser_round_trip(seed: u64, count: usize) -> Check {
    let mut r = rng(seed);
    for _ in 0..count {
        let text = random_expr(&mut r, 3);
        let p = parse_expr(&text).map_err(|e| format!("{text}: {e}"))?;
        let printed = print_expr(&p);
        let q = parse_expr(&printed).map_err(|e| format!("{printed}: {e}"))?;
        if q != p || print_expr(&q) != printed {
            return Err(format!("round trip fails on {text}"));
        }
        let d = poly(&mut r, 3, 5, 4, 4);
        if parse_expr(&print_expr(&d)).map_err(|e| e.to_string())? != d {
            return Err(format!("parse∘print fails on {d}"));
        }
    }
    Ok(format!("{count} expressions"))
}
