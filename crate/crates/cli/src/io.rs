//! Loading complexes and links, and the exit-code classification of errors.

use std::fmt;
use std::path::{Path, PathBuf};

use cstorus::cspath::CsError;
use cstorus::polycomplex::{builtin, ComplexDescription, ComplexError, JoinedComplex, PolyComplex, ProductComplex};
use cstorus::ribbon::{LinkDescription, RibbonLink};
use cstorus::shadow::ShadowError;
use cstorus::lie::LieError;

/// Exit code 1: a numerical tolerance was not met.
pub const EXIT_TOLERANCE: u8 = 1;
/// Exit code 2: bad input.
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn tolerance(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_TOLERANCE,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<ComplexError> for CliError {
    fn from(e: ComplexError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<cstorus::ribbon::RibbonError> for CliError {
    fn from(e: cstorus::ribbon::RibbonError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<LieError> for CliError {
    fn from(e: LieError) -> Self {
        match e {
            LieError::NotIntegral { .. } => CliError::tolerance(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<ShadowError> for CliError {
    fn from(e: ShadowError) -> Self {
        match e {
            ShadowError::Mismatch { .. } => CliError::tolerance(e.to_string()),
            ShadowError::Lie(l) => l.into(),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<CsError> for CliError {
    fn from(e: CsError) -> Self {
        match e {
            CsError::Cutoff { .. } | CsError::Denominator(_) | CsError::Quad(_) | CsError::Degenerate(_) => {
                CliError::tolerance(e.to_string())
            }
            CsError::Lie(l) => l.into(),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::input(format!("invalid JSON: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn read(path: &Path, what: &str) -> CliResult<String> {
    if !path.exists() {
        return Err(CliError::input(format!("{what} file not found: {}", path.display())));
    }
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

/// A builtin name (`tetrahedron`, `cube`, `icosahedron`, `hex_torus:NxM`)
/// or a JSON description file.
pub fn load_complex(spec: &str, base_dir: Option<&Path>) -> CliResult<PolyComplex> {
    if let Some(cx) = builtin::by_name(spec) {
        return Ok(cx);
    }
    let path = resolve(spec, base_dir);
    if !path.exists() && !spec.ends_with(".json") {
        return Err(CliError::input(format!("unknown complex '{spec}'")));
    }
    let text = read(&path, "complex")?;
    let d: ComplexDescription = serde_json::from_str(&text)?;
    check_schema(d.schema.as_deref())?;
    Ok(PolyComplex::from_description(&d)?)
}

pub fn check_schema(schema: Option<&str>) -> CliResult<()> {
    match schema {
        None | Some("v1") => Ok(()),
        Some(s) => Err(CliError::input(format!("unsupported schema '{s}'"))),
    }
}

pub fn resolve(spec: &str, base_dir: Option<&Path>) -> PathBuf {
    let p = PathBuf::from(spec);
    match base_dir {
        Some(d) if p.is_relative() => d.join(p),
        _ => p,
    }
}

/// Everything a validated link lives on.
pub struct Ambient {
    pub name: String,
    pub jc: JoinedComplex,
    pub pc: ProductComplex,
}

impl Ambient {
    pub fn new(name: &str, base_dir: Option<&Path>, n: usize) -> CliResult<Self> {
        let cx = load_complex(name, base_dir)?;
        let jc = JoinedComplex::from_base(cx)?;
        let pc = ProductComplex::new(&jc.qk, n)?;
        Ok(Ambient {
            name: name.to_string(),
            jc,
            pc,
        })
    }
}

pub fn read_link_description(path: &Path) -> CliResult<LinkDescription> {
    let text = read(path, "link")?;
    let d: LinkDescription = serde_json::from_str(&text)?;
    check_schema(Some(&d.schema))?;
    Ok(d)
}

/// Read and validate a link file. `complex` overrides the file's ambient
/// and `n` must agree with the file when given.
pub fn load_link(path: &Path, complex: Option<&str>, n: Option<usize>) -> CliResult<(Ambient, RibbonLink)> {
    let d = read_link_description(path)?;
    if let Some(n) = n {
        if n != d.n {
            return Err(CliError::input(format!("--n {n} disagrees with the link file's N = {}", d.n)));
        }
    }
    let base = path.parent();
    let amb = match complex {
        Some(c) => Ambient::new(c, None, d.n)?,
        None => Ambient::new(&d.ambient, base, d.n)?,
    };
    let link = d.build(&amb.jc, &amb.pc)?;
    Ok((amb, link))
}

pub fn write_json(path: Option<&Path>, value: &serde_json::Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            // a closed pipe (e.g. `| head`) is not an error
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}
