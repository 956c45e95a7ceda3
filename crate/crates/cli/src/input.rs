use std::fs;
use std::path::Path;

use ncfactor_core::{Abp, Alphabet, BlackBox, Circuit, Error, Field, NcPoly};

use crate::commands::Failure;
use crate::{GlobalOpts, Source};

/// Any of the three polynomial file formats.
pub enum Object {
    Poly(NcPoly),
    Circuit(Circuit),
    Abp(Abp),
}

impl Object {
    pub fn parse(text: &str) -> Result<Object, Error> {
        let kind = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .and_then(|l| l.split_whitespace().next())
            .unwrap_or("");
        match kind {
            "ncpoly" => NcPoly::from_text(text).map(Object::Poly),
            "ncc" => Circuit::from_text(text).map(Object::Circuit),
            "ncabp" => Abp::from_text(text).map(Object::Abp),
            _ => Err(Error::Parse {
                line: 1,
                msg: "expected an ncpoly, ncc or ncabp header".into(),
            }),
        }
    }

    pub fn as_blackbox(&self) -> &dyn BlackBox {
        match self {
            Object::Poly(p) => p,
            Object::Circuit(c) => c,
            Object::Abp(a) => a,
        }
    }

    pub fn field(&self) -> Field {
        self.as_blackbox().field()
    }

    pub fn alphabet(&self) -> Alphabet {
        self.as_blackbox().alphabet()
    }

    pub fn to_circuit(&self) -> Result<Circuit, Failure> {
        match self {
            Object::Poly(p) => Ok(Circuit::from_poly(p)),
            Object::Circuit(c) => Ok(c.clone()),
            Object::Abp(a) => Ok(Circuit::from_poly(&a.expand(a.depth())?)),
        }
    }

    pub fn to_poly(&self) -> Result<NcPoly, Failure> {
        Ok(match self {
            Object::Poly(p) => p.clone(),
            Object::Circuit(c) => c.expand(c.formal_degree())?,
            Object::Abp(a) => a.expand(a.depth())?,
        })
    }
}

pub fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

pub fn load(source: &Source, opts: &GlobalOpts) -> Result<Object, Failure> {
    let obj = match (&source.expr, &source.path) {
        (Some(expr), _) => {
            let field = opts.field.unwrap_or(Field::Rational);
            let alphabet = opts.nvars.map_or(Alphabet::Bivariate, Alphabet::Indexed);
            Object::Poly(NcPoly::parse_inline(field, alphabet, expr)?)
        }
        (None, Some(path)) => Object::parse(&read_text(path)?)?,
        (None, None) => return Err(Failure::Io("no input: give a file or --expr".into())),
    };
    if let Some(f) = opts.field {
        if f != obj.field() {
            return Err(Error::FieldMismatch(f.to_string(), obj.field().to_string()).into());
        }
    }
    Ok(obj)
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", path.display()));
    let name = path
        .file_name()
        .ok_or_else(|| Failure::Io(format!("{}: not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}
