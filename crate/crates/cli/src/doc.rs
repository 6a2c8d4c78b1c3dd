//! The line-oriented input format and its canonical serializer.
//!
//! ```text
//! [ring]
//! p=3 n=1 m=1
//! [module]
//! kind=phi g=1
//! u^3
//! [phi]
//! 1 + 2*u
//! [check]
//! check=alpha
//! ```
//!
//! Blocks are `[ring]`, `[module]`, `[phi]`, `[psi]`, `[fil]` and `[check]`.
//! A line whose first token contains `=` holds `key=value` pairs; any other
//! line is a matrix row of comma-separated literals. Literals are sums of
//! terms `c`, `c*u`, `c*u^k` and `c*u^k/dp(k)`, where `c` is an integer or a
//! Witt coefficient `[a0,...,a_(m-1)]`. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use prismalab_core::Error;

/// A term `coeff * u^exp`, or `coeff * u^exp / e(exp)!` when `dp` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    /// Integer Witt coordinates, no trailing zeros, nonempty.
    pub coeff: Vec<i64>,
    pub exp: usize,
    pub dp: bool,
}

/// A canonical sum of terms: sorted by `(exp, dp)`, merged, no zero terms.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Literal {
    terms: Vec<Term>,
}

impl Literal {
    pub fn new(terms: Vec<Term>) -> Literal {
        let mut acc: BTreeMap<(usize, bool), Vec<i64>> = BTreeMap::new();
        for t in terms {
            let key = (t.exp, t.dp && t.exp > 0);
            let c = acc.entry(key).or_default();
            if c.len() < t.coeff.len() {
                c.resize(t.coeff.len(), 0);
            }
            for (a, b) in c.iter_mut().zip(&t.coeff) {
                *a = a.wrapping_add(*b);
            }
        }
        let terms = acc
            .into_iter()
            .filter_map(|((exp, dp), mut coeff)| {
                while coeff.last() == Some(&0) {
                    coeff.pop();
                }
                (!coeff.is_empty()).then_some(Term { coeff, exp, dp })
            })
            .collect();
        Literal { terms }
    }

    pub fn constant(c: i64) -> Literal {
        Literal::new(vec![Term { coeff: vec![c], exp: 0, dp: false }])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl std::fmt::Display for Literal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.len() == 1 && t.coeff[0] < 0;
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let coeff = if t.coeff.len() == 1 {
                t.coeff[0].unsigned_abs().to_string()
            } else {
                format!("[{}]", t.coeff.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
            };
            if t.exp == 0 {
                f.write_str(&coeff)?;
                continue;
            }
            if coeff != "1" {
                write!(f, "{coeff}*")?;
            }
            f.write_str("u")?;
            if t.exp > 1 {
                write!(f, "^{}", t.exp)?;
            }
            if t.dp {
                write!(f, "/dp({})", t.exp)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ModuleKind {
    #[default]
    Phi,
    Kisin,
    Breuil,
    Fl,
    Etale,
    Cyclo,
}

impl ModuleKind {
    pub const ALL: [ModuleKind; 6] =
        [ModuleKind::Phi, ModuleKind::Kisin, ModuleKind::Breuil, ModuleKind::Fl, ModuleKind::Etale, ModuleKind::Cyclo];

    pub fn name(self) -> &'static str {
        match self {
            ModuleKind::Phi => "phi",
            ModuleKind::Kisin => "kisin",
            ModuleKind::Breuil => "breuil",
            ModuleKind::Fl => "fl",
            ModuleKind::Etale => "etale",
            ModuleKind::Cyclo => "cyclo",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingDesc {
    pub p: u64,
    pub n: u32,
    pub m: usize,
    /// Defining polynomial of the residue field, low degree first.
    pub f: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ModuleDecl {
    pub kind: ModuleKind,
    pub g: usize,
    pub free: usize,
    pub h: Option<usize>,
    pub eis: Option<Literal>,
    pub dz: Option<u32>,
    pub exps: Option<Vec<u32>>,
    pub bound: Option<usize>,
    pub dp_degree: Option<usize>,
    pub relations: Vec<Vec<Literal>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FilRow {
    /// `fil i: v -> phi_i(v)` for Fontaine-Laffaille modules.
    Level { level: usize, gen: Vec<Literal>, image: Vec<Literal> },
    /// `comp i: v`, a generator of the complement of `Fil^(i+1)` in `Fil^i`.
    Complement { level: usize, gen: Vec<Literal> },
    /// `v -> phi_h(v)` for Breuil modules.
    Top { gen: Vec<Literal>, image: Vec<Literal> },
    /// `nabla: v`, the connection on the next basis vector.
    Nabla { image: Vec<Literal> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckDecl {
    pub name: String,
    pub params: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub ring: RingDesc,
    pub module: ModuleDecl,
    pub phi: Vec<Vec<Literal>>,
    pub psi: Vec<Vec<Literal>>,
    pub fil: Vec<FilRow>,
    pub checks: Vec<CheckDecl>,
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::ParseError { line, col, msg: msg.into() }
}

/// Splits at top-level occurrences of `sep`, outside `[...]` and `(...)`.
/// Returns each piece with its character offset.
pub fn split_top(s: &str, sep: &str) -> Vec<(usize, String)> {
    let chars: Vec<char> = s.chars().collect();
    let sepc: Vec<char> = sep.chars().collect();
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        match chars[i] {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            _ => {}
        }
        if depth == 0 && chars[i..].starts_with(&sepc) {
            out.push((start, chars[start..i].iter().collect()));
            i += sepc.len();
            start = i;
            continue;
        }
        i += 1;
    }
    out.push((start, chars[start..].iter().collect()));
    out
}

struct Cursor<'a> {
    chars: &'a [char],
    i: usize,
}

impl Cursor<'_> {
    fn ws(&mut self) {
        while self.i < self.chars.len() && self.chars[self.i].is_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        self.ws();
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn uint(&mut self) -> Result<u64, (usize, String)> {
        self.ws();
        let start = self.i;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.i += 1;
        }
        if start == self.i {
            return Err((start, "expected a number".into()));
        }
        let s: String = self.chars[start..self.i].iter().collect();
        s.parse().map_err(|_| (start, "number out of range".into()))
    }

    fn int(&mut self) -> Result<i64, (usize, String)> {
        let neg = self.eat('-');
        let at = self.i;
        let v = i64::try_from(self.uint()?).map_err(|_| (at, "number out of range".to_string()))?;
        Ok(if neg { -v } else { v })
    }
}

/// Parses a literal; errors carry a character offset.
pub fn parse_literal(s: &str) -> Result<Literal, (usize, String)> {
    let chars: Vec<char> = s.chars().collect();
    let mut c = Cursor { chars: &chars, i: 0 };
    let mut terms = Vec::new();
    let mut first = true;
    loop {
        c.ws();
        if c.peek().is_none() {
            if first {
                return Err((c.i, "empty literal".into()));
            }
            break;
        }
        let sign: i64 = if c.eat('+') {
            1
        } else if c.eat('-') {
            -1
        } else if first {
            1
        } else {
            return Err((c.i, "expected '+' or '-'".into()));
        };
        first = false;
        c.ws();
        let at = c.i;
        let coeff: Option<Vec<i64>> = if c.eat('[') {
            let mut v = vec![c.int()?];
            while c.eat(',') {
                v.push(c.int()?);
            }
            if !c.eat(']') {
                return Err((c.i, "expected ']'".into()));
            }
            Some(v)
        } else if c.peek().is_some_and(|ch| ch.is_ascii_digit()) {
            let v = i64::try_from(c.uint()?).map_err(|_| (at, "number out of range".to_string()))?;
            Some(vec![v])
        } else {
            None
        };
        let star = c.eat('*');
        c.ws();
        let mut exp = 0usize;
        let has_u = c.peek() == Some('u');
        if has_u {
            c.i += 1;
            exp = 1;
            if c.eat('^') {
                exp = c.uint()? as usize;
            }
        } else if star || coeff.is_none() {
            return Err((c.i, "expected 'u'".into()));
        }
        let mut dp = false;
        if c.eat('/') {
            c.ws();
            let rest: String = chars[c.i..].iter().take(3).collect();
            if rest != "dp(" {
                return Err((c.i, "expected 'dp('".into()));
            }
            c.i += 3;
            let k = c.uint()? as usize;
            if !c.eat(')') {
                return Err((c.i, "expected ')'".into()));
            }
            if k != exp {
                return Err((c.i, format!("dp({k}) does not match u^{exp}")));
            }
            dp = true;
        }
        let coeff = coeff.unwrap_or_else(|| vec![1]).into_iter().map(|x| x * sign).collect();
        terms.push(Term { coeff, exp, dp });
    }
    Ok(Literal::new(terms))
}

fn parse_row(line: usize, col0: usize, s: &str) -> Result<Vec<Literal>, Error> {
    split_top(s, ",")
        .into_iter()
        .map(|(off, piece)| parse_literal(&piece).map_err(|(o, msg)| perr(line, col0 + off + o + 1, msg)))
        .collect()
}

fn is_ident(s: &str) -> bool {
    let mut ch = s.chars();
    ch.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && ch.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `key=value` pairs; tokens without `=` extend the previous value.
fn parse_pairs(line: usize, text: &str) -> Result<Vec<(String, String, usize)>, Error> {
    let mut out: Vec<(String, String, usize)> = Vec::new();
    let mut col = 0usize;
    for tok in text.split_whitespace() {
        let pos = text[col..].find(tok).map_or(col, |k| col + k);
        col = pos + tok.len();
        let cpos = text[..pos].chars().count() + 1;
        match tok.split_once('=') {
            Some((k, v)) if is_ident(k) => out.push((k.to_string(), v.to_string(), cpos)),
            Some(_) => return Err(perr(line, cpos, format!("bad key in '{tok}'"))),
            None => match out.last_mut() {
                Some(last) => {
                    last.1.push(' ');
                    last.1.push_str(tok);
                }
                None => return Err(perr(line, cpos, "expected key=value")),
            },
        }
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(line: usize, col: usize, key: &str, v: &str) -> Result<T, Error> {
    v.parse().map_err(|_| perr(line, col, format!("'{key}' expects a nonnegative integer, got '{v}'")))
}

fn num_list<T: std::str::FromStr>(line: usize, col: usize, key: &str, v: &str) -> Result<Vec<T>, Error> {
    v.split(',').map(|x| num(line, col, key, x.trim())).collect()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Block {
    Ring,
    Module,
    Phi,
    Psi,
    Fil,
    Check,
}

/// Rows remembered for the arity check once `g` is known.
struct RowPos {
    line: usize,
    len: usize,
}

pub fn parse(text: &str) -> Result<Document, Error> {
    let mut ring: Option<RingDesc> = None;
    let mut ring_keys: BTreeMap<String, (String, usize, usize)> = BTreeMap::new();
    let mut module = ModuleDecl::default();
    let mut phi = Vec::new();
    let mut psi = Vec::new();
    let mut fil = Vec::new();
    let mut checks: Vec<CheckDecl> = Vec::new();
    let mut seen: Vec<Block> = Vec::new();
    let mut block: Option<Block> = None;
    let mut rows: Vec<RowPos> = Vec::new();
    let mut ring_line = 0;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = body.chars().take_while(|c| c.is_whitespace()).count();
        if trimmed.starts_with('[') && trimmed.ends_with(']') && is_ident(&trimmed[1..trimmed.len() - 1]) {
            let b = match &trimmed[1..trimmed.len() - 1] {
                "ring" => Block::Ring,
                "module" => Block::Module,
                "phi" => Block::Phi,
                "psi" => Block::Psi,
                "fil" => Block::Fil,
                "check" => Block::Check,
                other => return Err(perr(line, indent + 1, format!("unknown block [{other}]"))),
            };
            if seen.contains(&b) {
                return Err(perr(line, indent + 1, format!("duplicate block {trimmed}")));
            }
            if b == Block::Ring {
                ring_line = line;
            }
            seen.push(b);
            block = Some(b);
            continue;
        }
        let Some(b) = block else {
            return Err(perr(line, indent + 1, "content before the first block"));
        };
        let first = trimmed.split_whitespace().next().unwrap_or("");
        let is_pairs = first.contains('=');
        match (b, is_pairs) {
            (Block::Ring, true) => {
                for (k, v, c) in parse_pairs(line, body)? {
                    if ring_keys.insert(k.clone(), (v, line, c)).is_some() {
                        return Err(perr(line, c, format!("duplicate key '{k}'")));
                    }
                }
            }
            (Block::Module, true) => {
                for (k, v, c) in parse_pairs(line, body)? {
                    match k.as_str() {
                        "kind" => {
                            module.kind = ModuleKind::ALL
                                .into_iter()
                                .find(|x| x.name() == v)
                                .ok_or_else(|| perr(line, c, format!("unknown module kind '{v}'")))?
                        }
                        "g" => module.g = num(line, c, &k, &v)?,
                        "free" => module.free = num(line, c, &k, &v)?,
                        "h" => module.h = Some(num(line, c, &k, &v)?),
                        "dz" => module.dz = Some(num(line, c, &k, &v)?),
                        "bound" => module.bound = Some(num(line, c, &k, &v)?),
                        "D" => module.dp_degree = Some(num(line, c, &k, &v)?),
                        "exps" => module.exps = Some(num_list(line, c, &k, &v)?),
                        "E" => {
                            let off = c + k.len();
                            module.eis = Some(parse_literal(&v).map_err(|(o, msg)| perr(line, off + o + 1, msg))?)
                        }
                        _ => return Err(perr(line, c, format!("unknown module key '{k}'"))),
                    }
                }
            }
            (Block::Check, true) => {
                for (k, v, c) in parse_pairs(line, body)? {
                    if k == "check" {
                        checks.push(CheckDecl { name: v, params: BTreeMap::new() });
                        continue;
                    }
                    let val = num(line, c, &k, &v)?;
                    match checks.last_mut() {
                        Some(ch) => {
                            ch.params.insert(k, val);
                        }
                        None => return Err(perr(line, c, "parameter before any check=<name>")),
                    }
                }
            }
            (Block::Module | Block::Phi | Block::Psi, false) => {
                let row = parse_row(line, indent, trimmed)?;
                rows.push(RowPos { line, len: row.len() });
                match b {
                    Block::Module => module.relations.push(row),
                    Block::Phi => phi.push(row),
                    _ => psi.push(row),
                }
            }
            (Block::Fil, false) => {
                let (row, lens) = parse_fil_row(line, indent, trimmed)?;
                for len in lens {
                    rows.push(RowPos { line, len });
                }
                fil.push(row);
            }
            _ => return Err(perr(line, indent + 1, "unexpected line in this block")),
        }
    }
    if !seen.contains(&Block::Ring) {
        return Err(perr(1, 1, "missing [ring] block"));
    }
    let get = |k: &str| ring_keys.get(k);
    let p = match get("p") {
        Some((v, l, c)) => num(*l, *c, "p", v)?,
        None => return Err(perr(ring_line, 1, "[ring] needs p")),
    };
    let n = match get("n") {
        Some((v, l, c)) => num(*l, *c, "n", v)?,
        None => 1,
    };
    let f: Option<Vec<u64>> = match get("f") {
        Some((v, l, c)) => Some(num_list(*l, *c, "f", v)?),
        None => None,
    };
    let m = match get("m") {
        Some((v, l, c)) => num(*l, *c, "m", v)?,
        None => f.as_ref().map_or(1, |f| f.len().saturating_sub(1)),
    };
    if let Some(k) = ring_keys.keys().find(|k| !["p", "n", "m", "f"].contains(&k.as_str())) {
        let (_, l, c) = &ring_keys[k];
        return Err(perr(*l, *c, format!("unknown ring key '{k}'")));
    }
    ring = ring.or(Some(RingDesc { p, n, m, f }));
    for r in &rows {
        if r.len != module.g {
            return Err(perr(r.line, 1, format!("row has {} entries, expected g = {}", r.len, module.g)));
        }
    }
    Ok(Document { ring: ring.expect("set above"), module, phi, psi, fil, checks })
}

fn parse_fil_row(line: usize, indent: usize, s: &str) -> Result<(FilRow, Vec<usize>), Error> {
    let (head, rest, off) = match s.split_once(':') {
        Some((h, r)) if !h.contains(',') && !h.contains("->") => (Some(h.trim()), r, h.chars().count() + 1),
        _ => (None, s, 0),
    };
    let col0 = indent + off;
    let parts = split_top(rest, "->");
    let two = |parts: &[(usize, String)]| -> Result<(Vec<Literal>, Vec<Literal>), Error> {
        if parts.len() != 2 {
            return Err(perr(line, col0 + 1, "expected 'generator -> image'"));
        }
        Ok((parse_row(line, col0 + parts[0].0, &parts[0].1)?, parse_row(line, col0 + parts[1].0, &parts[1].1)?))
    };
    let level = |word: &str, h: &str| -> Result<usize, Error> {
        num(line, indent + 1, word, h[word.len()..].trim())
    };
    match head {
        None => {
            let (gen, image) = two(&parts)?;
            let lens = vec![gen.len(), image.len()];
            Ok((FilRow::Top { gen, image }, lens))
        }
        Some("nabla") => {
            let image = parse_row(line, col0, rest)?;
            let lens = vec![image.len()];
            Ok((FilRow::Nabla { image }, lens))
        }
        Some(h) if h.starts_with("fil") => {
            let lvl = level("fil", h)?;
            let (gen, image) = two(&parts)?;
            let lens = vec![gen.len(), image.len()];
            Ok((FilRow::Level { level: lvl, gen, image }, lens))
        }
        Some(h) if h.starts_with("comp") => {
            let lvl = level("comp", h)?;
            let gen = parse_row(line, col0, rest)?;
            let lens = vec![gen.len()];
            Ok((FilRow::Complement { level: lvl, gen }, lens))
        }
        Some(h) => Err(perr(line, indent + 1, format!("unknown filtration row '{h}'"))),
    }
}

fn row_str(r: &[Literal]) -> String {
    r.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ")
}

fn list<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// The canonical text of a document.
pub fn serialize(d: &Document) -> String {
    let mut s = String::new();
    let r = &d.ring;
    let _ = write!(s, "[ring]\np={} n={} m={}", r.p, r.n, r.m);
    if let Some(f) = &r.f {
        let _ = write!(s, " f={}", list(f));
    }
    s.push('\n');
    let m = &d.module;
    let _ = write!(s, "[module]\nkind={} g={}", m.kind.name(), m.g);
    if m.free > 0 {
        let _ = write!(s, " free={}", m.free);
    }
    if let Some(h) = m.h {
        let _ = write!(s, " h={h}");
    }
    if let Some(dz) = m.dz {
        let _ = write!(s, " dz={dz}");
    }
    if let Some(b) = m.bound {
        let _ = write!(s, " bound={b}");
    }
    if let Some(dd) = m.dp_degree {
        let _ = write!(s, " D={dd}");
    }
    if let Some(e) = &m.exps {
        let _ = write!(s, " exps={}", list(e));
    }
    if let Some(e) = &m.eis {
        let _ = write!(s, " E={e}");
    }
    s.push('\n');
    for row in &m.relations {
        let _ = writeln!(s, "{}", row_str(row));
    }
    for (name, rows) in [("phi", &d.phi), ("psi", &d.psi)] {
        if !rows.is_empty() {
            let _ = writeln!(s, "[{name}]");
            for row in rows {
                let _ = writeln!(s, "{}", row_str(row));
            }
        }
    }
    if !d.fil.is_empty() {
        s.push_str("[fil]\n");
        for row in &d.fil {
            let _ = match row {
                FilRow::Level { level, gen, image } => writeln!(s, "fil {level}: {} -> {}", row_str(gen), row_str(image)),
                FilRow::Complement { level, gen } => writeln!(s, "comp {level}: {}", row_str(gen)),
                FilRow::Top { gen, image } => writeln!(s, "{} -> {}", row_str(gen), row_str(image)),
                FilRow::Nabla { image } => writeln!(s, "nabla: {}", row_str(image)),
            };
        }
    }
    if !d.checks.is_empty() {
        s.push_str("[check]\n");
        for c in &d.checks {
            let _ = write!(s, "check={}", c.name);
            for (k, v) in &c.params {
                let _ = write!(s, " {k}={v}");
            }
            s.push('\n');
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_forms() {
        let l = parse_literal("c0").unwrap_err();
        assert_eq!(l.0, 0);
        let l = parse_literal("3 + 2*u - u^3 + [1,2]*u^4/dp(4)").unwrap();
        assert_eq!(l.to_string(), "3 + 2*u - u^3 + [1,2]*u^4/dp(4)");
        assert_eq!(parse_literal("u + u").unwrap().to_string(), "2*u");
        assert_eq!(parse_literal("u - u").unwrap().to_string(), "0");
        assert_eq!(parse_literal("[5,0]").unwrap().to_string(), "5");
        assert!(parse_literal("2*u^3/dp(2)").is_err());
    }

    #[test]
    fn bracket_aware_split() {
        let parts: Vec<String> = split_top("[1,2]*u, 3, u^2/dp(2)", ",").into_iter().map(|p| p.1).collect();
        assert_eq!(parts, vec!["[1,2]*u", " 3", " u^2/dp(2)"]);
    }

    #[test]
    fn document_round_trip() {
        let text = "# cyclic\n[ring]\np=3 n=2 m=1\n[module]\nkind=phi g=1\nu^3\n[phi]\n1 + 2*u\n[check]\ncheck=alpha\n";
        let d = parse(text).unwrap();
        assert_eq!(d.module.relations[0][0].to_string(), "u^3");
        let s = serialize(&d);
        assert_eq!(parse(&s).unwrap(), d);
        assert_eq!(serialize(&parse(&s).unwrap()), s);
    }

    #[test]
    fn positioned_errors() {
        let e = parse("[ring]\np=3\n[module]\ng=2\n1, 2*v\n").unwrap_err();
        assert!(matches!(e, Error::ParseError { line: 5, col: 6, .. }), "{e:?}");
        let e = parse("[ring]\np=3\n[module]\ng=2\n1\n").unwrap_err();
        assert!(matches!(e, Error::ParseError { line: 5, .. }));
        assert!(matches!(parse("p=3\n"), Err(Error::ParseError { line: 1, .. })));
    }
}
