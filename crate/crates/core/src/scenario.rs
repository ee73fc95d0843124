//! Declarative verification scenarios.
//!
//! A scenario file is UTF-8 text made of sections headed by `[kind]`. Each section may set
//! `profile = N,Dx,Dy,dim` and then lists payload lines `key i j .. = value`, where series
//! values use the canonical term grammar of [`crate::text`]. `#` starts a comment.
//!
//! ```text
//! [fedosov]
//! profile = 6,4,6,2
//! pi 1 2 = 1 h^1
//! mode = quantum
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fedosov::{fedosov_recursion, weyl_visible, ConnectionData, Mode};
use crate::gauge::{check_closed, check_formal, pi_from_omega, OmegaSeries};
use crate::hseries::HSeries;
use crate::matrix::SeriesMatrix;
use crate::mono::Exps;
use crate::polyvector::{DiffForm, PolyVectorField};
use crate::profile::Profile;
use crate::report::{Check, Report, Section};
use crate::star::{ConstPoissonMatrix, StarProduct};
use crate::suite;
use crate::text::{format_hseries, format_weyl, parse_hseries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Moyal,
    Normalizer,
    BfieldEquivalence,
    TransitionDemo,
    Gauge,
    Fedosov,
    Ode,
    DglaSuite,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::Moyal,
        Kind::Normalizer,
        Kind::BfieldEquivalence,
        Kind::TransitionDemo,
        Kind::Gauge,
        Kind::Fedosov,
        Kind::Ode,
        Kind::DglaSuite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Moyal => "moyal",
            Kind::Normalizer => "normalizer",
            Kind::BfieldEquivalence => "bfield-equivalence",
            Kind::TransitionDemo => "transition-demo",
            Kind::Gauge => "gauge",
            Kind::Fedosov => "fedosov",
            Kind::Ode => "ode",
            Kind::DglaSuite => "dgla-suite",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Kind::Moyal => &["pi", "degree"],
            Kind::Normalizer => &["pi"],
            Kind::BfieldEquivalence => &["pi", "b"],
            Kind::TransitionDemo => &["pi", "c", "winding"],
            Kind::Gauge => &["pi", "b", "b2", "seed", "instances"],
            Kind::Fedosov => &["pi", "omega", "gamma", "mode", "degree"],
            Kind::Ode | Kind::DglaSuite => &["seed", "instances"],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown scenario kind `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Series(HSeries),
    Int(i64),
    Word(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Series(s) => f.write_str(&format_hseries(s)),
            Value::Int(n) => write!(f, "{n}"),
            Value::Word(w) => f.write_str(w),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    /// 1-based indices as written.
    pub idx: Vec<usize>,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSection {
    pub kind: Kind,
    pub profile: Profile,
    pub line: usize,
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Scenario {
    pub sections: Vec<ScenarioSection>,
}

/// Index count and value type per key.
fn schema(key: &str) -> Option<(usize, &'static str)> {
    Some(match key {
        "pi" | "b" | "b2" | "omega" | "c" => (2, "series"),
        "gamma" => (3, "series"),
        "winding" => (2, "int"),
        "degree" | "seed" | "instances" => (0, "int"),
        "mode" => (0, "word"),
        _ => return None,
    })
}

fn parse_err(line: usize, msg: impl fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

fn invalid(line: usize, msg: impl fmt::Display) -> Error {
    Error::Validation(format!("line {line}: {msg}"))
}

/// Errors caused by the input rather than by a failed identity.
pub fn is_input_error(e: &Error) -> bool {
    !matches!(
        e,
        Error::NoConvergence(_) | Error::NonTermination(_) | Error::CheckFailed(_)
    )
}

/// Attaches a line number to an input error.
fn at(line: usize, e: Error) -> Error {
    match e {
        Error::Parse(m) => parse_err(line, m),
        Error::Validation(m) => invalid(line, m),
        e if is_input_error(&e) => invalid(line, e),
        e => e,
    }
}

struct Pending {
    kind: Kind,
    line: usize,
    profile: Option<(usize, Profile)>,
    lines: Vec<(usize, String, String)>,
}

impl Scenario {
    /// Parses and type-checks a scenario; `profile` overrides every section's profile.
    pub fn parse(text: &str, profile: Option<Profile>) -> Result<Self> {
        let mut pending: Vec<Pending> = vec![];
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            if let Some(h) = l.strip_prefix('[') {
                let name = h
                    .strip_suffix(']')
                    .ok_or_else(|| parse_err(line, "unterminated section header"))?;
                let kind = name.trim().parse().map_err(|e| at(line, e))?;
                pending.push(Pending {
                    kind,
                    line,
                    profile: None,
                    lines: vec![],
                });
                continue;
            }
            let cur = pending
                .last_mut()
                .ok_or_else(|| parse_err(line, "payload before the first [section]"))?;
            let (k, v) = l
                .split_once('=')
                .ok_or_else(|| parse_err(line, "expected `key = value`"))?;
            let (k, v) = (k.trim(), v.trim());
            if k == "profile" {
                if cur.profile.is_some() {
                    return Err(parse_err(line, "profile set twice"));
                }
                let p: Profile = v.parse().map_err(|e| at(line, e))?;
                cur.profile = Some((line, p));
            } else {
                cur.lines.push((line, k.to_string(), v.to_string()));
            }
        }
        if pending.is_empty() {
            return Err(Error::Parse("scenario has no sections".into()));
        }
        let mut sections = vec![];
        for pd in pending {
            let (pline, p) = match (profile, pd.profile) {
                (Some(o), _) => (pd.line, o),
                (None, Some(x)) => x,
                (None, None) => (pd.line, Profile::desk()),
            };
            p.check_cli_bounds().map_err(|e| at(pline, e))?;
            let mut entries = vec![];
            for (line, k, v) in pd.lines {
                entries.push(parse_entry(pd.kind, &p, line, &k, &v)?);
            }
            sections.push(ScenarioSection {
                kind: pd.kind,
                profile: p,
                line: pd.line,
                entries,
            });
        }
        Ok(Scenario { sections })
    }

    /// Canonical text: comments dropped, series in canonical form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (n, s) in self.sections.iter().enumerate() {
            if n > 0 {
                out.push('\n');
            }
            out.push_str(&format!("[{}]\nprofile = {}\n", s.kind, s.profile));
            for e in &s.entries {
                let mut key = e.key.clone();
                for i in &e.idx {
                    key.push_str(&format!(" {i}"));
                }
                out.push_str(&format!("{key} = {}\n", e.value));
            }
        }
        out
    }

    /// Runs every section. Input problems found while running abort with an error; failed
    /// identities are recorded in the report.
    pub fn run(&self) -> Result<Report> {
        let mut report = Report::default();
        for s in &self.sections {
            report.sections.push(s.run()?);
        }
        Ok(report)
    }
}

fn parse_entry(kind: Kind, p: &Profile, line: usize, key: &str, value: &str) -> Result<Entry> {
    let mut words = key.split_whitespace();
    let name = words.next().ok_or_else(|| parse_err(line, "empty key"))?;
    let (nidx, ty) =
        schema(name).ok_or_else(|| parse_err(line, format!("unknown key `{name}`")))?;
    if !kind.keys().contains(&name) {
        return Err(invalid(
            line,
            format!("key `{name}` is not used by [{kind}]"),
        ));
    }
    let idx = words
        .map(|w| {
            w.parse::<usize>()
                .map_err(|_| parse_err(line, format!("bad index `{w}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if idx.len() != nidx {
        return Err(parse_err(
            line,
            format!("`{name}` takes {nidx} indices, got {}", idx.len()),
        ));
    }
    // cocycle entries are indexed by the three open sets, everything else by coordinates
    let bound = if matches!(name, "c" | "winding") {
        3
    } else {
        p.dim
    };
    if let Some(i) = idx.iter().find(|&&i| i == 0 || i > bound) {
        return Err(invalid(line, format!("index {i} out of range 1..={bound}")));
    }
    let value = match ty {
        "series" => Value::Series(parse_hseries(p, value).map_err(|e| at(line, e))?),
        "int" => Value::Int(
            value
                .parse()
                .map_err(|_| parse_err(line, format!("expected an integer, got `{value}`")))?,
        ),
        _ => {
            if name == "mode" && !matches!(value, "quantum" | "classical") {
                return Err(parse_err(
                    line,
                    format!("mode must be quantum or classical, got `{value}`"),
                ));
            }
            Value::Word(value.to_string())
        }
    };
    Ok(Entry {
        line,
        key: name.to_string(),
        idx,
        value,
    })
}

impl ScenarioSection {
    fn entries<'a>(&'a self, key: &str) -> impl Iterator<Item = &'a Entry> + 'a {
        let key = key.to_string();
        self.entries.iter().filter(move |e| e.key == key)
    }

    fn single(&self, key: &str) -> Result<Option<&Entry>> {
        let mut it = self.entries(key);
        let first = it.next();
        if let Some(e) = it.next() {
            return Err(invalid(e.line, format!("`{key}` given twice")));
        }
        Ok(first)
    }

    fn int(&self, key: &str, default: i64) -> Result<i64> {
        Ok(match self.single(key)?.map(|e| &e.value) {
            Some(Value::Int(n)) => *n,
            _ => default,
        })
    }

    fn count(&self, key: &str, default: usize) -> Result<usize> {
        let n = self.int(key, default as i64)?;
        usize::try_from(n).map_err(|_| invalid(self.line, format!("`{key}` must be non-negative")))
    }

    fn first_line(&self, key: &str) -> usize {
        self.entries(key).next().map_or(self.line, |e| e.line)
    }

    /// A d×d matrix from `key i j` entries. An entry whose transpose is not given is
    /// mirrored with `sign`; entries given twice are rejected.
    fn matrix(&self, key: &str, sign: i64) -> Result<Option<SeriesMatrix>> {
        let p = self.profile;
        let mut given: BTreeMap<(usize, usize), HSeries> = BTreeMap::new();
        for e in self.entries(key) {
            let Value::Series(v) = &e.value else {
                unreachable!()
            };
            if given
                .insert((e.idx[0] - 1, e.idx[1] - 1), v.clone())
                .is_some()
            {
                return Err(invalid(
                    e.line,
                    format!("`{key} {} {}` given twice", e.idx[0], e.idx[1]),
                ));
            }
        }
        if given.is_empty() {
            return Ok(None);
        }
        let mut m = SeriesMatrix::zero(&p, p.dim);
        for (&(i, j), v) in &given {
            m.set(i, j, v.clone());
            if !given.contains_key(&(j, i)) {
                m.set(j, i, v.scale_int(sign));
            }
        }
        Ok(Some(m))
    }

    fn required_matrix(&self, key: &str, sign: i64) -> Result<SeriesMatrix> {
        self.matrix(key, sign)?.ok_or_else(|| {
            invalid(
                self.line,
                format!("[{}] needs `{key} i j` entries", self.kind),
            )
        })
    }

    fn const_pi(&self) -> Result<ConstPoissonMatrix> {
        let m = self.required_matrix("pi", -1)?;
        ConstPoissonMatrix::new(m).map_err(|e| at(self.first_line("pi"), e))
    }

    /// A 2-form from `key i j` entries; must be closed.
    fn closed_form(&self, key: &str) -> Result<Option<DiffForm>> {
        let Some(m) = self.matrix(key, -1)? else {
            return Ok(None);
        };
        let line = self.first_line(key);
        if !m.is_antisymmetric() {
            return Err(at(line, Error::NotAntisymmetric));
        }
        let b = DiffForm::from_matrix(&m);
        check_closed(&b).map_err(|e| at(line, e))?;
        Ok(Some(b))
    }

    fn poisson_bivector(&self) -> Result<PolyVectorField> {
        let m = self.required_matrix("pi", -1)?;
        let line = self.first_line("pi");
        if !m.is_antisymmetric() {
            return Err(at(line, Error::NotAntisymmetric));
        }
        let pi = PolyVectorField::from_matrix(&m);
        check_formal(&pi).map_err(|e| at(line, e))?;
        let jac = pi.schouten(&pi);
        if let Some((s, c)) = jac.comps().iter().next() {
            return Err(invalid(
                line,
                format!(
                    "π is not Poisson: [π,π] has component ({}) = {}",
                    s.fmt_one_based(),
                    format_hseries(c)
                ),
            ));
        }
        Ok(pi)
    }

    pub fn run(&self) -> Result<Section> {
        // validation errors surface before any work, with the offending line
        let mut failure = None;
        let s = suite::timed(self.kind.name(), &self.profile, |s| {
            let r = self.run_into(s);
            if let Err(e) = &r {
                if is_input_error(e) {
                    failure = Some(e.clone());
                }
            }
            r
        });
        match failure {
            Some(e) => Err(e),
            None => Ok(s),
        }
    }

    fn run_into(&self, s: &mut Section) -> Result<()> {
        let p = self.profile;
        match self.kind {
            Kind::Moyal => {
                let pi = self.const_pi()?;
                let deg = self.int("degree", p.x_degree.min(4) as i64)?;
                let deg = u32::try_from(deg).map_err(|_| {
                    invalid(self.first_line("degree"), "degree must be non-negative")
                })?;
                suite::moyal_checks(s, &pi, deg.min(p.x_degree));
                Ok(())
            }
            Kind::Normalizer => {
                let pi = self.const_pi()?;
                suite::normalizer_checks(s, &pi).map_err(|e| at(self.first_line("pi"), e))
            }
            Kind::BfieldEquivalence => {
                let pi = self.const_pi()?;
                let b = self.closed_form("b")?.ok_or_else(|| {
                    invalid(self.line, "[bfield-equivalence] needs `b i j` entries")
                })?;
                suite::bfield_checks(s, &pi, &b, "").map_err(|e| at(self.first_line("b"), e))
            }
            Kind::TransitionDemo => self.run_transition(s),
            Kind::Gauge => {
                let inst = match self.matrix("pi", -1)? {
                    Some(_) => {
                        let pi = self.poisson_bivector()?;
                        let zero = DiffForm::zero(&p);
                        let b = self.closed_form("b")?.ok_or_else(|| {
                            invalid(self.line, "[gauge] with `pi` needs `b i j` entries")
                        })?;
                        let b2 = self.closed_form("b2")?.unwrap_or(zero);
                        vec![(b, b2, pi)]
                    }
                    None => {
                        let seed = self.int("seed", suite::GAUGE_SEED as i64)? as u64;
                        suite::gauge_instances(&p, self.count("instances", 10)?, seed)
                    }
                };
                suite::gauge_checks(s, &p, &inst)
            }
            Kind::Fedosov => self.run_fedosov(s),
            Kind::Ode => {
                let seed = self.int("seed", 7)? as u64;
                suite::ode_checks(s, &p, self.count("instances", 10)?, seed)
            }
            Kind::DglaSuite => {
                let seed = self.int("seed", 8)? as u64;
                suite::dgla_checks(s, &p, self.count("instances", 10)?, seed)
            }
        }
    }

    fn run_transition(&self, s: &mut Section) -> Result<()> {
        let p = self.profile;
        let star = StarProduct::moyal(&self.const_pi()?);
        let mut c: [(HSeries, i64); 3] = std::array::from_fn(|_| (HSeries::zero(&p), 0));
        let slot = |e: &Entry| -> Result<usize> {
            match (e.idx[0], e.idx[1]) {
                (1, 2) => Ok(0),
                (2, 3) => Ok(1),
                (3, 1) => Ok(2),
                (a, b) => Err(invalid(
                    e.line,
                    format!("cocycle entries are `1 2`, `2 3`, `3 1`; got `{a} {b}`"),
                )),
            }
        };
        for e in self.entries("c") {
            let Value::Series(v) = &e.value else {
                unreachable!()
            };
            c[slot(e)?].0 = v.clone();
        }
        for e in self.entries("winding") {
            let Value::Int(n) = e.value else {
                unreachable!()
            };
            c[slot(e)?].1 = n;
        }
        suite::transition_checks(s, &star, &c, "").map_err(|e| at(self.first_line("c"), e))
    }

    fn run_fedosov(&self, s: &mut Section) -> Result<()> {
        let p = self.profile;
        let pi = match (self.matrix("pi", -1)?, self.matrix("omega", -1)?) {
            (Some(_), Some(_)) => {
                return Err(invalid(
                    self.first_line("omega"),
                    "give either `pi` or `omega`, not both",
                ))
            }
            (None, None) => {
                return Err(invalid(
                    self.line,
                    "[fedosov] needs `pi i j` or `omega i j` entries",
                ))
            }
            (Some(m), None) => {
                let line = self.first_line("pi");
                if !m.is_antisymmetric() {
                    return Err(at(line, Error::NotAntisymmetric));
                }
                m
            }
            (None, Some(w)) => {
                let line = self.first_line("omega");
                if !w.is_antisymmetric() {
                    return Err(at(line, Error::NotAntisymmetric));
                }
                pi_from_omega(&OmegaSeries { shifted: w })
                    .map_err(|e| at(line, e))?
                    .to_matrix()
            }
        };
        let pline = self.first_line(if self.matrix("pi", -1)?.is_some() {
            "pi"
        } else {
            "omega"
        });
        if pi.e.iter().any(|c| !c.is_x_constant()) {
            return Err(invalid(
                pline,
                "the fiber Poisson matrix must be constant in x",
            ));
        }
        let gline = self.first_line("gamma");
        let conn = self.connection()?;
        let mode = match self.single("mode")?.map(|e| &e.value) {
            Some(Value::Word(w)) if w == "classical" => Mode::Classical,
            _ => Mode::Quantum,
        };
        let st = fedosov_recursion(&conn, &pi, mode).map_err(|e| at(gline, e))?;
        s.value(
            "mode",
            if mode == Mode::Quantum {
                "quantum"
            } else {
                "classical"
            },
        );
        s.value("iterations", st.iterations.to_string());
        s.value("r", format_weyl(&st.r()));
        s.value("b", format_weyl(&st.b()));
        s.check(Check::zero("certificate", &st.certificate()?));
        if mode == Mode::Classical {
            return Ok(());
        }
        s.check(Check::zero("class_residual", &st.class_residual()?));
        let cl = fedosov_recursion(&conn, &pi, Mode::Classical)?;
        s.check(Check::zero(
            "r_minus_rcl_below_hbar2",
            &st.difference(&cl).filter(|m| m.k < 2),
        ));

        let deg = self.int("degree", 2)?;
        let deg = u32::try_from(deg)
            .map_err(|_| invalid(self.first_line("degree"), "degree must be non-negative"))?;
        let ms: Vec<HSeries> = Exps::up_to_degree(p.dim, deg.min(p.x_degree))
            .into_iter()
            .map(|e| HSeries::monomial(&p, 0, e, crate::coeff::CRational::one()))
            .collect();
        let tm = st.star_table(&ms)?;
        for (i, f) in ms.iter().enumerate() {
            for (j, g) in ms.iter().enumerate() {
                if i <= j && i > 0 {
                    s.value(
                        format!("star {} {}", mono_name(f), mono_name(g)),
                        format_hseries(&tm[i][j]),
                    );
                }
            }
        }
        let orig = st.original()?;
        s.check(Check::zero(
            "original_class_residual",
            &orig.class_residual()?,
        ));
        let tf = orig.star_table(&ms)?;
        let d: Vec<HSeries> = tm
            .iter()
            .flatten()
            .zip(tf.iter().flatten())
            .map(|(a, b)| weyl_visible(&(a - b), &p))
            .collect();
        s.check(Check::zero("star_f_minus_star_m", &d));
        Ok(())
    }

    /// Christoffel symbols from `gamma k i j` entries, mirrored in `i j` when only one is given.
    fn connection(&self) -> Result<ConnectionData> {
        let p = self.profile;
        let d = p.dim;
        let mut given: BTreeMap<(usize, usize, usize), HSeries> = BTreeMap::new();
        for e in self.entries("gamma") {
            let Value::Series(v) = &e.value else {
                unreachable!()
            };
            if given
                .insert((e.idx[0] - 1, e.idx[1] - 1, e.idx[2] - 1), v.clone())
                .is_some()
            {
                return Err(invalid(e.line, "Christoffel symbol given twice"));
            }
        }
        if given.is_empty() {
            return Ok(ConnectionData::flat(&p));
        }
        let mut gamma = vec![HSeries::zero(&p); d * d * d];
        for (&(k, i, j), v) in &given {
            gamma[(k * d + i) * d + j] = v.clone();
            if !given.contains_key(&(k, j, i)) {
                gamma[(k * d + j) * d + i] = v.clone();
            }
        }
        ConnectionData::new(&p, gamma).map_err(|e| at(self.first_line("gamma"), e))
    }
}

fn mono_name(f: &HSeries) -> String {
    let (_, e, _) = f.terms().next().expect("monomial");
    format!("x^{}", e.fmt_dim(f.profile().dim))
}

/// Reads, parses and runs a scenario file.
pub fn run_file(path: &std::path::Path, profile: Option<Profile>) -> Result<Report> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Scenario::parse(&text, profile)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        let text = "# demo\n[moyal]\npi 1 2 = 1 h^1 + 1 h^3  # Π\ndegree = 3\n\n[ode]\nseed = 3\ninstances = 2\n";
        let sc = Scenario::parse(text, None).unwrap();
        let t = sc.to_text();
        let again = Scenario::parse(&t, None).unwrap();
        assert_eq!(again.to_text(), t);
        let vals = |s: &Scenario| {
            s.sections
                .iter()
                .flat_map(|x| x.entries.iter().map(|e| e.value.clone()))
                .collect::<Vec<_>>()
        };
        assert_eq!(vals(&again), vals(&sc));
        assert!(t.contains("profile = 6,4,6,2"));
    }

    #[test]
    fn parse_errors_carry_lines() {
        let e = Scenario::parse("[moyal]\npi 1 2 = 1 h^1\nfoo = 3\n", None).unwrap_err();
        assert!(
            matches!(&e, Error::Parse(m) if m.starts_with("line 3:")),
            "{e}"
        );
        let e = Scenario::parse("[nope]\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse(_)));
        let e = Scenario::parse("[moyal]\nprofile = 17,4,6,2\n", None).unwrap_err();
        assert!(
            matches!(&e, Error::Validation(m) if m.starts_with("line 2:")),
            "{e}"
        );
        let e = Scenario::parse("[moyal]\npi 1 3 = 1 h^1\n", None).unwrap_err();
        assert!(matches!(e, Error::Validation(_)));
    }

    #[test]
    fn broken_inputs_are_validation_errors() {
        let sc = Scenario::parse("[moyal]\npi 1 2 = 1 h^1\npi 2 1 = 1 h^1\n", None).unwrap();
        let e = sc.run().unwrap_err();
        assert!(
            matches!(&e, Error::Validation(m) if m.contains("line 2") && m.contains("antisymmetric")),
            "{e}"
        );

        let text = "[gauge]\nprofile = 4,3,4,3\npi 1 2 = 1 h^1\nb 1 2 = 1 x^(0,0,1)\n";
        let e = Scenario::parse(text, None).unwrap().run().unwrap_err();
        assert!(
            matches!(&e, Error::Validation(m) if m.contains("line 4") && m.contains("dx(1,2,3)")),
            "{e}"
        );
    }

    #[test]
    fn flat_fedosov_scenario() {
        let sc = Scenario::parse("[fedosov]\npi 1 2 = 1 h^1\nmode = quantum\n", None).unwrap();
        let r = sc.run().unwrap();
        assert!(r.passed(), "{}", r.render());
        assert!(r.render().contains("\nclass_residual: 0 terms\n"));
        assert!(r.render().contains("r: 0\n"));
    }

    #[test]
    fn explicit_sections_pass() {
        let text = "[normalizer]\npi 1 2 = 1 h^1 + 1 h^2\n\n[bfield-equivalence]\npi 1 2 = 1 h^1\nb 1 2 = 1/2\n\n\
                    [transition-demo]\npi 1 2 = 1 h^1\nc 1 2 = 1\nc 2 3 = 1\nc 3 1 = -2\nwinding 1 2 = 1\n";
        let r = Scenario::parse(text, None).unwrap().run().unwrap();
        assert!(r.passed(), "{}", r.render());
        assert!(r.render().contains("triple_product: exp(2πi·1·t)"));
    }
}
