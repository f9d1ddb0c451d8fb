//! `vp`: command line access to the varpois library.
//!
//! Exit codes: 0 on success, 1 when the checked property does not hold, 2 on bad input.

mod docs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use varpois::expr::parse_expr_in;
use varpois::{hamcoh, magri, polyvec, superlie, DiffPoly, Error, LocalFunctional, QMatrix};

#[derive(Parser)]
#[command(name = "vp", version, about = "Exact variational Poisson cohomology and Hamiltonian operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pair {
    So,
    Gl,
}

#[derive(Subcommand)]
enum Command {
    /// Is K skewadjoint?
    CheckSkewadjoint {
        #[arg(long = "K")]
        k: PathBuf,
    },
    /// Is K a Hamiltonian operator?
    CheckHamiltonian {
        #[arg(long = "K")]
        k: PathBuf,
    },
    /// Is [K, H] = 0?
    Compatible {
        #[arg(long = "K")]
        k: PathBuf,
        #[arg(long = "H")]
        h: PathBuf,
    },
    /// Schouten bracket of two polyvector fields.
    Schouten {
        #[arg(long = "P")]
        p: PathBuf,
        #[arg(long = "Q")]
        q: PathBuf,
    },
    /// Dimensions of H^k for k = -1, ..., kmax (constant coefficient K).
    Cohomology {
        #[arg(long = "K")]
        k: PathBuf,
        #[arg(long)]
        kmax: i32,
    },
    /// Basis of the Casimirs of K.
    Casimirs {
        #[arg(long = "K")]
        k: PathBuf,
    },
    /// Runs the Lenard-Magri recursion K δh_{n+1} = H δh_n.
    Lenard {
        #[arg(long = "K")]
        k: PathBuf,
        #[arg(long = "H")]
        h: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        seed: String,
        #[arg(long)]
        steps: usize,
    },
    /// The density of ⟨F|G⟩_K; F and G are comma separated.
    InnerProduct {
        #[arg(long = "K")]
        k: PathBuf,
        #[arg(long = "F", allow_hyphen_values = true)]
        f: String,
        #[arg(long = "G", allow_hyphen_values = true)]
        g: String,
    },
    /// Do all iterated brackets of P with Casimirs of K vanish?
    Essential {
        #[arg(long = "K")]
        k: PathBuf,
        #[arg(long = "P")]
        p: PathBuf,
    },
    /// Graded dimensions of H̃(n, S).
    Htilde {
        #[arg(long)]
        n: usize,
        #[arg(long = "S")]
        s: PathBuf,
        #[arg(long)]
        dims: bool,
    },
    /// Graded dimensions of the full prolongation of (C^n, g).
    Prolongation {
        #[arg(long, value_enum)]
        pair: Pair,
        #[arg(long)]
        n: usize,
        #[arg(long = "S")]
        s: Option<PathBuf>,
        #[arg(long)]
        kmax: i32,
    },
    /// Is Λ ⊕ uΛ_S for K = S·D isomorphic to H̃(ℓ+1, S̃)?
    IsoCheck {
        #[arg(long)]
        ell: usize,
        #[arg(long = "S")]
        s: PathBuf,
    },
}

#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::input(e.to_string())
    }
}

/// Key/value lines in insertion order.
struct Report {
    lines: Vec<(String, String)>,
    holds: bool,
}

impl Report {
    fn new() -> Self {
        Report {
            lines: Vec::new(),
            holds: true,
        }
    }

    fn put(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    fn check(&mut self, key: &str, value: bool) {
        self.put(key, value);
        self.holds &= value;
    }

    fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            if v.contains('\n') {
                out.push_str(&format!("{k}:\n"));
                for line in v.lines() {
                    out.push_str(&format!("  {line}\n"));
                }
            } else {
                out.push_str(&format!("{k}: {v}\n"));
            }
        }
        out
    }
}

fn list<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    let items: Vec<String> = xs.into_iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(", "))
}

fn parse_vector(text: &str, ell: usize) -> Result<Vec<DiffPoly>, Failure> {
    let parts: Vec<DiffPoly> = text
        .split(',')
        .map(|s| parse_expr_in(s, ell))
        .collect::<Result<_, _>>()?;
    if parts.len() != ell {
        return Err(Failure::input(format!("expected {ell} comma separated entries, got {}", parts.len())));
    }
    Ok(parts)
}

fn require_symmetric(s: &QMatrix, n: usize) -> Result<(), Failure> {
    if s.rows() != n || s.cols() != n {
        return Err(Failure::input(format!("S must be {n} x {n}")));
    }
    if !s.is_symmetric() {
        return Err(Error::NotSymmetric.into());
    }
    Ok(())
}

fn matrix_table(rows: &[Vec<bool>]) -> String {
    rows.iter()
        .map(|r| r.iter().map(|&b| if b { "1" } else { "0" }).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
}

fn run(command: Command) -> Result<Report, Failure> {
    let mut r = Report::new();
    match command {
        Command::CheckSkewadjoint { k } => {
            let k = docs::load_operator(&k)?;
            r.check("skewadjoint", k.is_skewadjoint()?);
        }
        Command::CheckHamiltonian { k } => {
            let k = docs::load_operator(&k)?;
            let skew = k.is_skewadjoint()?;
            r.check("skewadjoint", skew);
            r.check("hamiltonian", skew && hamcoh::is_hamiltonian(&k)?);
        }
        Command::Compatible { k, h } => {
            let k = docs::load_operator(&k)?;
            let h = docs::load_operator(&h)?;
            if k.rows() != h.rows() {
                return Err(Failure::input("operators have different sizes"));
            }
            let skew = k.is_skewadjoint()? && h.is_skewadjoint()?;
            r.check("skewadjoint", skew);
            r.check("compatible", skew && hamcoh::is_compatible(&k, &h)?);
        }
        Command::Schouten { p, q } => {
            let p = docs::load_polyvector(&p)?;
            let q = docs::load_polyvector(&q)?;
            if p.ell() != q.ell() {
                return Err(Failure::input("polyvector fields over different ell"));
            }
            let b = polyvec::schouten(&p, &q);
            r.put("ell", b.ell());
            r.put("degree", b.degree());
            r.put("zero", b.is_zero());
            r.put("bracket", b.to_string().trim_end());
        }
        Command::Cohomology { k, kmax } => {
            let k = docs::load_operator(&k)?;
            let report = hamcoh::cohomology_dimensions(&k, kmax)?;
            r.put("ell", report.ell);
            r.put("order", report.order);
            r.put("degrees", list(report.entries.iter().map(|e| e.degree)));
            r.put("dims", list(report.dimensions()));
            r.put("bounds", list(report.entries.iter().map(|e| e.bound)));
            r.put("bounds_attained", list(report.entries.iter().map(|e| e.bound_attained)));
            r.put("all_bounds_attained", report.all_bounds_attained());
        }
        Command::Casimirs { k } => {
            let k = docs::load_operator(&k)?;
            let basis = hamcoh::casimir_basis(&k)?;
            r.put("count", basis.len());
            r.put("casimirs", basis.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "));
            r.put("note", "functionals are cosets modulo total derivatives");
        }
        Command::Lenard { k, h, seed, steps } => {
            let k = docs::load_operator(&k)?;
            let h = docs::load_operator(&h)?;
            if k.rows() != h.rows() {
                return Err(Failure::input("operators have different sizes"));
            }
            let seed = LocalFunctional::new(parse_expr_in(&seed, k.rows())?);
            let state = match magri::build_hierarchy(&k, &h, &seed, steps) {
                Err(e @ (Error::Incompatible | Error::NotCasimir | Error::NotSkewAdjoint)) => {
                    r.check("valid_pair_and_seed", false);
                    r.put("reason", e);
                    return Ok(r);
                }
                other => other?,
            };
            for (n, f) in state.functionals.iter().enumerate() {
                r.put(&format!("h_{n}"), f);
            }
            r.holds &= state.obstructed_at.is_none();
            r.put("obstructed_at", state.obstructed_at.map_or("none".to_string(), |n| n.to_string()));
            r.check("recursion", state.recursion_holds()?);
            let all_h = state.involution_h.iter().flatten().all(|&b| b);
            let all_k = state.involution_k.iter().flatten().all(|&b| b);
            r.put("involution_H", if all_h { "all true".to_string() } else { matrix_table(&state.involution_h) });
            r.put("involution_K", if all_k { "all true".to_string() } else { matrix_table(&state.involution_k) });
            r.holds &= all_h && all_k;
            r.put("note", "functionals are cosets modulo total derivatives");
        }
        Command::InnerProduct { k, f, g } => {
            let k = docs::load_operator(&k)?;
            let f = parse_vector(&f, k.rows())?;
            let g = parse_vector(&g, k.rows())?;
            r.put("inner_product", hamcoh::inner_product(&k, &f, &g)?);
        }
        Command::Essential { k, p } => {
            let k = docs::load_operator(&k)?;
            let p = docs::load_polyvector(&p)?;
            if p.ell() != k.rows() {
                return Err(Failure::input("polyvector field and operator have different ell"));
            }
            r.put("degree", p.degree());
            r.check("essential", hamcoh::is_essential(&k, &p)?);
        }
        Command::Htilde { n, s, dims } => {
            let s = docs::load_matrix(&s)?;
            require_symmetric(&s, n)?;
            r.put("n", n);
            r.put("rank_S", s.rank());
            let d = superlie::htilde_dims(n);
            r.put("degrees", list(-1..(n as i32 - 1)));
            if dims {
                r.put("dims", list(&d));
            }
            r.put("total", d.iter().sum::<usize>());
        }
        Command::Prolongation { pair, n, s, kmax } => {
            let g = match pair {
                Pair::So => {
                    let path = s.ok_or_else(|| Failure::input("--S is required for --pair so"))?;
                    let s = docs::load_matrix(&path)?;
                    require_symmetric(&s, n)?;
                    superlie::so_basis(&s)?
                }
                Pair::Gl => (0..n * n)
                    .map(|e| {
                        let mut m = QMatrix::zeros(n, n);
                        m[(e / n, e % n)] = varpois::rational::int(1);
                        m
                    })
                    .collect(),
            };
            let p = superlie::full_prolongation(n, &g, kmax)?;
            r.put("n", n);
            r.put("degrees", list(-1..=kmax));
            r.put("dims", list(p.dims()));
        }
        Command::IsoCheck { ell, s } => {
            let s = docs::load_matrix(&s)?;
            require_symmetric(&s, ell)?;
            let report = superlie::iso_check_translation_case(&s)?;
            r.put("ell", ell);
            r.put("dims_A", list(&report.dims_a));
            r.put("dims_H", list(&report.dims_h));
            r.check("isomorphic", report.isomorphic);
        }
    }
    Ok(r)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            print!("{}", report.render());
            ExitCode::from(if report.holds { 0 } else { 1 })
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
