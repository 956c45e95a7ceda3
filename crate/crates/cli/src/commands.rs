use std::fmt::Write as _;

use ncfactor_core::arith::parse_rational;
use ncfactor_core::linmat::{
    factor_3x3, factorization_to_zdiv, quaternion_linmat, search_zero_divisor, verify_cert,
    zdiv_to_factorization, Factor3x3,
};
use ncfactor_core::oracle::complete_factorizations;
use ncfactor_core::words::enumerate_words;
use ncfactor_core::{
    reduce_and_recover, BigRational, DenseOracle, Embedding, Error, FactorizationCert, LinearMatrix,
    MatrixAssignment, Quaternion, SubstAutomaton,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::input::{load, read_text, Object};
use crate::{Command, GlobalOpts, QuatParams, Source};

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    Domain(Error),
    Io(String),
    Rejected(String),
}

impl Failure {
    pub fn code(&self) -> &'static str {
        match self {
            Failure::Domain(e) => e.code(),
            Failure::Io(_) => "io",
            Failure::Rejected(_) => "cert-rejected",
        }
    }

    pub fn detail(&self) -> String {
        match self {
            Failure::Domain(e) => e.to_string(),
            Failure::Io(s) | Failure::Rejected(s) => s.clone(),
        }
    }

    /// 1 for unreadable or malformed input, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Domain(e) if e.is_parse() => 1,
            Failure::Io(_) => 1,
            _ => 2,
        }
    }
}

type Out = Result<String, Failure>;

pub fn dispatch(cmd: &Command, opts: &GlobalOpts) -> Out {
    match cmd {
        Command::Words { n } => words(n.or(opts.nvars), opts),
        Command::Embed(src) => embed(src, opts),
        Command::Recover(src) => recover(src, opts),
        Command::Reduce(src) => reduce(src, opts),
        Command::FactorDense(src) => factor_dense(src, opts),
        Command::Eval { source, dim } => eval(source, *dim, opts),
        Command::FactorLinmat3 { path } => factor_linmat3(&read_linmat(path)?),
        Command::QuaternionBuild { params } => {
            let (alpha, beta) = quat_params(params)?;
            Ok(quaternion_linmat(&alpha, &beta)?.to_text())
        }
        Command::QuaternionZdiv2fact { params, z, bound } => zdiv2fact(params, z.as_deref(), *bound),
        Command::QuaternionFact2zdiv { cert, params } => fact2zdiv(&read_cert(cert)?, params),
        Command::VerifyCert { cert, linmat } => {
            if verify_cert(&read_cert(cert)?, &read_linmat(linmat)?)? {
                Ok("ok\n".into())
            } else {
                Err(Failure::Rejected("factor product differs from P·L·Q".into()))
            }
        }
    }
}

fn words(n: Option<usize>, opts: &GlobalOpts) -> Out {
    let n = n.ok_or_else(|| Error::Precondition("words needs --n".into()))?;
    let set = enumerate_words(n, opts.mode)?;
    Ok(set.words().iter().map(|w| w.to_xy_string() + "\n").collect())
}

fn source_nvars(obj: &Object, opts: &GlobalOpts) -> usize {
    opts.nvars.unwrap_or(obj.alphabet().size())
}

fn embed(src: &Source, opts: &GlobalOpts) -> Out {
    let obj = load(src, opts)?;
    let e = Embedding::from_mode(source_nvars(&obj, opts), opts.mode)?;
    Ok(match &obj {
        Object::Poly(p) => e.phi_poly(p)?.to_text(),
        Object::Circuit(c) => e.phi_circuit(c)?.to_text(),
        Object::Abp(a) => e.phi_abp(a)?.to_text(),
    })
}

fn recover(src: &Source, opts: &GlobalOpts) -> Out {
    let obj = load(src, opts)?;
    let n = opts
        .nvars
        .ok_or_else(|| Error::Precondition("recover needs --nvars".into()))?;
    let e = Embedding::from_mode(n, opts.mode)?;
    let aut = SubstAutomaton::from_embedding(&e)?;
    Ok(match &obj {
        Object::Poly(p) => {
            let c = aut.recover_circuit(&ncfactor_core::Circuit::from_poly(p))?;
            c.expand(c.formal_degree())?.to_text()
        }
        Object::Circuit(c) => aut.recover_circuit(c)?.to_text(),
        Object::Abp(a) => aut.recover_abp(a)?.to_text(),
    })
}

fn reduce(src: &Source, opts: &GlobalOpts) -> Out {
    let obj = load(src, opts)?;
    let f = obj.to_poly()?;
    let e = Embedding::from_mode(source_nvars(&obj, opts), opts.mode)?;
    let oracle = DenseOracle { budget: opts.budget };
    let factors = reduce_and_recover(&obj.to_circuit()?, &e, &oracle)?
        .iter()
        .map(|c| c.expand(c.formal_degree()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut prod = ncfactor_core::NcPoly::one(f.field(), f.alphabet());
    for g in &factors {
        prod = prod.mul(&g.with_alphabet(f.alphabet())?)?;
    }
    if prod != f {
        return Err(Error::ProductMismatch("recovered factors do not multiply back".into()).into());
    }
    let mut s = String::new();
    for (i, g) in factors.iter().enumerate() {
        let _ = writeln!(s, "# factor {} of {}", i + 1, factors.len());
        s.push_str(&g.to_text());
    }
    Ok(s)
}

fn factor_dense(src: &Source, opts: &GlobalOpts) -> Out {
    let f = load(src, opts)?.to_poly()?;
    let tree = complete_factorizations(&f, opts.budget)?;
    let mut s = format!("factorizations {}\n", tree.factorizations.len());
    for (i, fac) in tree.factorizations.iter().enumerate() {
        if fac.product(f.field(), f.alphabet())? != f {
            return Err(Error::ProductMismatch(format!("factorization {}", i + 1)).into());
        }
        let _ = writeln!(s, "factorization {}\nscalar {}", i + 1, fac.scalar);
        for g in &fac.factors {
            let _ = writeln!(s, "factor {g}");
        }
    }
    Ok(s)
}

fn eval(src: &Source, dim: usize, opts: &GlobalOpts) -> Out {
    let obj = load(src, opts)?;
    if dim == 0 {
        return Err(Error::Precondition("--dim must be positive".into()).into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let a = MatrixAssignment::random(obj.field(), obj.alphabet().size(), dim, &mut rng);
    let m = obj.as_blackbox().eval(&a)?;
    Ok(format!("eval seed={} dim={dim}\n{m}", opts.seed))
}

fn read_linmat(path: &std::path::Path) -> Result<LinearMatrix, Failure> {
    Ok(LinearMatrix::from_text(&read_text(path)?)?)
}

fn read_cert(path: &std::path::Path) -> Result<FactorizationCert, Failure> {
    Ok(FactorizationCert::from_text(&read_text(path)?)?)
}

fn factor_linmat3(l: &LinearMatrix) -> Out {
    match factor_3x3(l)? {
        Factor3x3::Factored(cert) => {
            if !verify_cert(&cert, l)? {
                return Err(Error::ProductMismatch("certificate failed its own check".into()).into());
            }
            Ok(cert.to_text())
        }
        Factor3x3::Irreducible(reason) => Ok(format!("irreducible: {reason}\n")),
    }
}

fn quat_params(p: &QuatParams) -> Result<(BigRational, BigRational), Failure> {
    if let Some(path) = &p.linmat {
        let l = read_linmat(path)?;
        if l.dim() == 4 && l.nvars() == 2 {
            let (alpha, beta) = (l.coeff(1)[(1, 0)].clone(), l.coeff(2)[(2, 0)].clone());
            if quaternion_linmat(&alpha, &beta).is_ok_and(|q| q == l) {
                return Ok((alpha, beta));
            }
        }
        return Err(Error::Precondition(format!("{} is not a quaternion linear matrix", path.display())).into());
    }
    match (&p.alpha, &p.beta) {
        (Some(a), Some(b)) => Ok((parse_rational(a)?, parse_rational(b)?)),
        _ => Err(Error::Precondition("give --alpha and --beta, or --linmat".into()).into()),
    }
}

fn zdiv2fact(params: &QuatParams, z: Option<&str>, bound: i64) -> Out {
    let (alpha, beta) = quat_params(params)?;
    let z = match z {
        Some(s) => Quaternion::parse(&alpha, &beta, s)?,
        None => search_zero_divisor(&alpha, &beta, bound)?.ok_or_else(|| {
            Error::Precondition(format!("no zero divisor with coordinates bounded by {bound}"))
        })?,
    };
    let cert = zdiv_to_factorization(&z)?;
    if !verify_cert(&cert, &quaternion_linmat(&alpha, &beta)?)? {
        return Err(Error::ProductMismatch("certificate failed its own check".into()).into());
    }
    Ok(cert.to_text())
}

fn fact2zdiv(cert: &FactorizationCert, params: &QuatParams) -> Out {
    let (alpha, beta) = quat_params(params)?;
    let (f, g) = cert.two_factor_split()?;
    let (z1, z2) = factorization_to_zdiv(&alpha, &beta, &f, &g)?;
    Ok(format!("z1 {z1}\nz2 {z2}\n"))
}
