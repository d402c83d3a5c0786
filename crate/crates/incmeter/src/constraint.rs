//! Denial constraint language: AST, recursive-descent parser, dependency
//! sugar, and pretty-printing.
//!
//! A constraint `denial name: A1, ..., Ak -> phi` reads: every binding of
//! tuples matching all atoms (with consistent shared variables) must
//! satisfy `phi`. `phi` is a disjunction of conjunctions of comparisons;
//! an empty `phi` is false, so every full match is a violation. This is
//! the guarded rendering of the disjunction ~A1 | ... | ~Ak | phi.
//!
//! Functional dependencies (`fd`) and numerical dependencies (`nd`)
//! desugar to plain denial constraints.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::Error;
use crate::model::{AttributeKind, CmpOp, Schema, Value};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(Value),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationAtom {
    pub relation: String,
    pub args: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Comparison {
    pub left: Term,
    pub op: CmpOp,
    pub right: Term,
}

/// One conjunct of the DNF guard.
pub type Conjunction = Vec<Comparison>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DenialConstraint {
    pub name: String,
    pub atoms: Vec<RelationAtom>,
    /// Disjunction of conjunctions; empty means false (pure denial).
    pub phi: Vec<Conjunction>,
}

impl DenialConstraint {
    pub fn arity(&self) -> usize {
        self.atoms.len()
    }

    /// Structural identity ignoring the name. Used for set semantics on
    /// constraint formulas (unions, intersections).
    pub fn body(&self) -> (&[RelationAtom], &[Conjunction]) {
        (&self.atoms, &self.phi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ConstraintSet {
    constraints: Vec<DenialConstraint>,
}

impl ConstraintSet {
    pub fn new(constraints: Vec<DenialConstraint>) -> Result<ConstraintSet, Error> {
        let mut names = BTreeMap::new();
        for c in &constraints {
            if names.insert(c.name.clone(), ()).is_some() {
                return Err(Error::Validation(format!("duplicate constraint name {}", c.name)));
            }
        }
        Ok(ConstraintSet { constraints })
    }

    pub fn iter(&self) -> impl Iterator<Item = &DenialConstraint> {
        self.constraints.iter()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&DenialConstraint> {
        self.constraints.iter().find(|c| c.name == name)
    }

    pub fn without(&self, name: &str) -> Result<ConstraintSet, Error> {
        if self.get(name).is_none() {
            return Err(Error::Validation(format!("unknown constraint {name}")));
        }
        Ok(ConstraintSet {
            constraints: self
                .constraints
                .iter()
                .filter(|c| c.name != name)
                .cloned()
                .collect(),
        })
    }

    pub fn with(&self, c: DenialConstraint) -> Result<ConstraintSet, Error> {
        let mut all = self.constraints.clone();
        all.push(c);
        ConstraintSet::new(all)
    }

    /// Set union by structural body; on name clash with equal bodies the
    /// first occurrence wins, on unequal bodies the second is renamed.
    pub fn union(&self, other: &ConstraintSet) -> ConstraintSet {
        let mut out = self.constraints.clone();
        for c in &other.constraints {
            if out.iter().any(|d| d.body() == c.body()) {
                continue;
            }
            let mut c = c.clone();
            while out.iter().any(|d| d.name == c.name) {
                c.name.push('_');
            }
            out.push(c);
        }
        ConstraintSet { constraints: out }
    }

    /// Structural intersection (by body).
    pub fn intersects(&self, other: &ConstraintSet) -> bool {
        self.constraints
            .iter()
            .any(|c| other.constraints.iter().any(|d| d.body() == c.body()))
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    IntLit(String),
    RatLit(String),
    DateLit(String),
    TextLit(String),
    Arrow,
    Colon,
    Comma,
    LParen,
    RParen,
    Pipe,
    Amp,
    Op(CmpOp),
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, Error> {
    let mut toks = Vec::new();
    let mut chars: Vec<char> = text.chars().collect();
    chars.push('\n');
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    let n = chars.len();
    macro_rules! push {
        ($t:expr, $l:expr, $c:expr) => {
            toks.push(Spanned { tok: $t, line: $l, col: $c })
        };
    }
    while i < n {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut advance = |i: &mut usize, line: &mut usize, col: &mut usize| {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col);
            continue;
        }
        if c == '#' {
            while i < n && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col);
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < n && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                advance(&mut i, &mut line, &mut col);
            }
            push!(Tok::Ident(s), tl, tc);
            continue;
        }
        if c.is_ascii_digit() || (c == '-' && i + 1 < n && chars[i + 1].is_ascii_digit()) {
            let mut s = String::new();
            if c == '-' {
                s.push('-');
                advance(&mut i, &mut line, &mut col);
            }
            while i < n {
                let d = chars[i];
                let continues = d.is_ascii_digit()
                    || d == '.'
                    || d == '/'
                    || (d == '-' && i + 1 < n && chars[i + 1].is_ascii_digit());
                if !continues {
                    break;
                }
                s.push(d);
                advance(&mut i, &mut line, &mut col);
            }
            let tok = classify_literal(&s).ok_or_else(|| {
                Error::parse_at(tl, tc, format!("malformed literal `{s}`"))
            })?;
            push!(tok, tl, tc);
            continue;
        }
        if c == '"' {
            advance(&mut i, &mut line, &mut col);
            let mut s = String::new();
            while i < n && chars[i] != '"' && chars[i] != '\n' {
                s.push(chars[i]);
                advance(&mut i, &mut line, &mut col);
            }
            if i >= n || chars[i] != '"' {
                return Err(Error::parse_at(tl, tc, "unterminated string literal"));
            }
            advance(&mut i, &mut line, &mut col);
            push!(Tok::TextLit(s), tl, tc);
            continue;
        }
        let two = if i + 1 < n {
            Some((chars[i], chars[i + 1]))
        } else {
            None
        };
        match two {
            Some(('-', '>')) => {
                advance(&mut i, &mut line, &mut col);
                advance(&mut i, &mut line, &mut col);
                push!(Tok::Arrow, tl, tc);
                continue;
            }
            Some(('!', '=')) => {
                advance(&mut i, &mut line, &mut col);
                advance(&mut i, &mut line, &mut col);
                push!(Tok::Op(CmpOp::Ne), tl, tc);
                continue;
            }
            Some(('<', '=')) => {
                advance(&mut i, &mut line, &mut col);
                advance(&mut i, &mut line, &mut col);
                push!(Tok::Op(CmpOp::Le), tl, tc);
                continue;
            }
            Some(('>', '=')) => {
                advance(&mut i, &mut line, &mut col);
                advance(&mut i, &mut line, &mut col);
                push!(Tok::Op(CmpOp::Ge), tl, tc);
                continue;
            }
            _ => {}
        }
        let single = match c {
            ':' => Some(Tok::Colon),
            ',' => Some(Tok::Comma),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '|' => Some(Tok::Pipe),
            '&' => Some(Tok::Amp),
            '=' => Some(Tok::Op(CmpOp::Eq)),
            '<' => Some(Tok::Op(CmpOp::Lt)),
            '>' => Some(Tok::Op(CmpOp::Gt)),
            _ => None,
        };
        match single {
            Some(t) => {
                advance(&mut i, &mut line, &mut col);
                push!(t, tl, tc);
            }
            None => return Err(Error::parse_at(tl, tc, format!("unexpected character `{c}`"))),
        }
    }
    push!(Tok::Eof, line, col);
    Ok(toks)
}

fn classify_literal(s: &str) -> Option<Tok> {
    let body = s.strip_prefix('-').unwrap_or(s);
    let is_date = {
        let parts: Vec<&str> = body.split('-').collect();
        !s.starts_with('-')
            && parts.len() == 3
            && parts[0].len() == 4
            && parts[1].len() == 2
            && parts[2].len() == 2
            && parts.iter().all(|p| p.bytes().all(|b| b.is_ascii_digit()))
    };
    if is_date {
        return Some(Tok::DateLit(s.to_string()));
    }
    if body.bytes().all(|b| b.is_ascii_digit()) && !body.is_empty() {
        return Some(Tok::IntLit(s.to_string()));
    }
    let frac = body.split_once('/');
    if let Some((p, q)) = frac {
        if !p.is_empty()
            && !q.is_empty()
            && p.bytes().all(|b| b.is_ascii_digit())
            && q.bytes().all(|b| b.is_ascii_digit())
        {
            return Some(Tok::RatLit(s.to_string()));
        }
    }
    if let Some((w, f)) = body.split_once('.') {
        if !w.is_empty()
            && !f.is_empty()
            && w.bytes().all(|b| b.is_ascii_digit())
            && f.bytes().all(|b| b.is_ascii_digit())
        {
            return Some(Tok::RatLit(s.to_string()));
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

/// A constant literal before kind coercion.
#[derive(Clone, Debug)]
enum RawConst {
    Int(String),
    Rat(String),
    Date(String),
    Text(String),
}

impl RawConst {
    fn coerce(&self, kind: AttributeKind) -> Option<Value> {
        match (self, kind) {
            (RawConst::Int(s), AttributeKind::Int) => Value::parse_as(kind, s).ok(),
            (RawConst::Int(s), AttributeKind::Rat) => Value::parse_as(kind, s).ok(),
            (RawConst::Rat(s), AttributeKind::Rat) => Value::parse_as(kind, s).ok(),
            (RawConst::Date(s), AttributeKind::Date) => Value::parse_as(kind, s).ok(),
            (RawConst::Text(s), AttributeKind::Text) => Some(Value::Text(s.clone())),
            _ => None,
        }
    }

    fn default_kind(&self) -> AttributeKind {
        match self {
            RawConst::Int(_) => AttributeKind::Int,
            RawConst::Rat(_) => AttributeKind::Rat,
            RawConst::Date(_) => AttributeKind::Date,
            RawConst::Text(_) => AttributeKind::Text,
        }
    }

    fn describe(&self) -> String {
        match self {
            RawConst::Int(s) | RawConst::Rat(s) | RawConst::Date(s) => s.clone(),
            RawConst::Text(s) => format!("\"{s}\""),
        }
    }
}

#[derive(Clone, Debug)]
enum RawTerm {
    Var(String),
    Const(RawConst),
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    schema: &'a Schema,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, sp: &Spanned, msg: impl Into<String>) -> Result<T, Error> {
        Err(Error::parse_at(sp.line, sp.col, msg))
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, Error> {
        let sp = self.next();
        match sp.tok {
            Tok::Ident(s) => Ok(s),
            _ => self.err(&sp, format!("expected {what}")),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), Error> {
        let sp = self.next();
        if sp.tok == tok {
            Ok(())
        } else {
            self.err(&sp, format!("expected {what}"))
        }
    }

    fn parse_file(&mut self) -> Result<ConstraintSet, Error> {
        let mut out = Vec::new();
        loop {
            let sp = self.peek().clone();
            match &sp.tok {
                Tok::Eof => break,
                Tok::Ident(kw) if kw == "denial" => {
                    self.next();
                    out.push(self.parse_denial()?);
                }
                Tok::Ident(kw) if kw == "fd" => {
                    self.next();
                    out.push(self.parse_fd()?);
                }
                Tok::Ident(kw) if kw == "nd" => {
                    self.next();
                    out.push(self.parse_nd()?);
                }
                _ => return self.err(&sp, "expected `denial`, `fd`, or `nd`"),
            }
        }
        ConstraintSet::new(out)
    }

    fn parse_denial(&mut self) -> Result<DenialConstraint, Error> {
        let name = self.expect_ident("constraint name")?;
        self.expect(Tok::Colon, "`:`")?;
        let mut raw_atoms = vec![self.parse_atom()?];
        while self.peek().tok == Tok::Comma {
            self.next();
            raw_atoms.push(self.parse_atom()?);
        }
        let arrow = self.peek().clone();
        self.expect(Tok::Arrow, "`->`")?;
        let raw_phi = self.parse_dnf()?;
        self.typecheck(name, raw_atoms, raw_phi, &arrow)
    }

    fn parse_atom(&mut self) -> Result<(String, Vec<(RawTerm, Spanned)>, Spanned), Error> {
        let sp = self.peek().clone();
        let relation = self.expect_ident("relation name")?;
        self.expect(Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        loop {
            let tsp = self.peek().clone();
            args.push((self.parse_term()?, tsp));
            let sep = self.next();
            match sep.tok {
                Tok::Comma => continue,
                Tok::RParen => break,
                _ => return self.err(&sep, "expected `,` or `)`"),
            }
        }
        Ok((relation, args, sp))
    }

    fn parse_term(&mut self) -> Result<RawTerm, Error> {
        let sp = self.next();
        match sp.tok {
            Tok::Ident(s) => Ok(RawTerm::Var(s)),
            Tok::IntLit(s) => Ok(RawTerm::Const(RawConst::Int(s))),
            Tok::RatLit(s) => Ok(RawTerm::Const(RawConst::Rat(s))),
            Tok::DateLit(s) => Ok(RawTerm::Const(RawConst::Date(s))),
            Tok::TextLit(s) => Ok(RawTerm::Const(RawConst::Text(s))),
            _ => self.err(&sp, "expected a term"),
        }
    }

    /// Parses the guard. Stops at the start of the next declaration or EOF.
    fn parse_dnf(&mut self) -> Result<Vec<Vec<(RawTerm, CmpOp, RawTerm, Spanned)>>, Error> {
        let mut dnf = Vec::new();
        if self.at_decl_boundary() {
            return Ok(dnf);
        }
        loop {
            let mut conj = vec![self.parse_cmp()?];
            while self.peek().tok == Tok::Amp {
                self.next();
                conj.push(self.parse_cmp()?);
            }
            dnf.push(conj);
            if self.peek().tok == Tok::Pipe {
                self.next();
                continue;
            }
            break;
        }
        Ok(dnf)
    }

    fn at_decl_boundary(&self) -> bool {
        match &self.peek().tok {
            Tok::Eof => true,
            Tok::Ident(kw) => kw == "denial" || kw == "fd" || kw == "nd",
            _ => false,
        }
    }

    fn parse_cmp(&mut self) -> Result<(RawTerm, CmpOp, RawTerm, Spanned), Error> {
        let sp = self.peek().clone();
        let left = self.parse_term()?;
        let opsp = self.next();
        let op = match opsp.tok {
            Tok::Op(op) => op,
            _ => return self.err(&opsp, "expected a comparison operator"),
        };
        let right = self.parse_term()?;
        Ok((left, op, right, sp))
    }

    /// Resolves variable kinds from atom positions, coerces constants,
    /// and checks range restriction and comparison typing.
    fn typecheck(
        &self,
        name: String,
        raw_atoms: Vec<(String, Vec<(RawTerm, Spanned)>, Spanned)>,
        raw_phi: Vec<Vec<(RawTerm, CmpOp, RawTerm, Spanned)>>,
        guard_sp: &Spanned,
    ) -> Result<DenialConstraint, Error> {
        let mut var_kinds: BTreeMap<String, AttributeKind> = BTreeMap::new();
        let mut atoms = Vec::new();
        for (relation, args, sp) in raw_atoms {
            let scheme = match self.schema.relation(&relation) {
                Some(s) => s,
                None => return self.err(&sp, format!("unknown relation {relation}")),
            };
            if args.len() != scheme.arity() {
                return self.err(
                    &sp,
                    format!(
                        "relation {relation} has arity {}, atom has {} arguments",
                        scheme.arity(),
                        args.len()
                    ),
                );
            }
            let mut terms = Vec::new();
            for (i, (arg, asp)) in args.into_iter().enumerate() {
                let kind = scheme.attributes[i].1;
                match arg {
                    RawTerm::Var(v) => {
                        if let Some(prev) = var_kinds.insert(v.clone(), kind) {
                            if prev != kind {
                                return self.err(
                                    &asp,
                                    format!(
                                        "variable {v} used at kinds {} and {}",
                                        prev.name(),
                                        kind.name()
                                    ),
                                );
                            }
                        }
                        terms.push(Term::Var(v));
                    }
                    RawTerm::Const(c) => match c.coerce(kind) {
                        Some(v) => terms.push(Term::Const(v)),
                        None => {
                            return self.err(
                                &asp,
                                format!(
                                    "constant {} does not fit attribute {} of kind {}",
                                    c.describe(),
                                    scheme.attributes[i].0,
                                    kind.name()
                                ),
                            )
                        }
                    },
                }
            }
            atoms.push(RelationAtom { relation, args: terms });
        }

        let mut phi = Vec::new();
        for raw_conj in raw_phi {
            let mut conj = Vec::new();
            for (l, op, r, sp) in raw_conj {
                let kind_of = |t: &RawTerm| -> Result<AttributeKind, Error> {
                    match t {
                        RawTerm::Var(v) => var_kinds.get(v).copied().ok_or_else(|| {
                            Error::parse_at(
                                sp.line,
                                sp.col,
                                format!("variable {v} does not occur in any relation atom"),
                            )
                        }),
                        RawTerm::Const(c) => Ok(c.default_kind()),
                    }
                };
                let lk = kind_of(&l)?;
                let rk = kind_of(&r)?;
                // Resolve the comparison kind: variables pin it, constants
                // adapt (an int literal may serve as a rational).
                let kind = match (&l, &r) {
                    (RawTerm::Var(_), _) => lk,
                    (_, RawTerm::Var(_)) => rk,
                    _ => lk,
                };
                let to_term = |t: RawTerm| -> Result<Term, Error> {
                    match t {
                        RawTerm::Var(v) => Ok(Term::Var(v)),
                        RawTerm::Const(c) => c.coerce(kind).map(Term::Const).ok_or_else(|| {
                            Error::parse_at(
                                sp.line,
                                sp.col,
                                format!("constant {} is not of kind {}", c.describe(), kind.name()),
                            )
                        }),
                    }
                };
                if op.is_order() {
                    let effective = |t: &RawTerm, k: AttributeKind| match t {
                        RawTerm::Var(_) => k,
                        RawTerm::Const(c) => {
                            if c.coerce(kind).is_some() {
                                kind
                            } else {
                                k
                            }
                        }
                    };
                    if effective(&l, lk) != effective(&r, rk) {
                        return self.err(
                            &sp,
                            format!(
                                "order comparison between kinds {} and {}",
                                lk.name(),
                                rk.name()
                            ),
                        );
                    }
                }
                conj.push(Comparison {
                    left: to_term(l)?,
                    op,
                    right: to_term(r)?,
                });
            }
            phi.push(conj);
        }

        if atoms.is_empty() {
            return self.err(guard_sp, "constraint needs at least one relation atom");
        }
        Ok(DenialConstraint { name, atoms, phi })
    }

    fn parse_fd(&mut self) -> Result<DenialConstraint, Error> {
        let name = self.expect_ident("constraint name")?;
        self.expect(Tok::Colon, "`:`")?;
        let sp = self.peek().clone();
        let relation = self.expect_ident("relation name")?;
        self.expect(Tok::Colon, "`:`")?;
        let lhs = self.parse_attrlist()?;
        self.expect(Tok::Arrow, "`->`")?;
        let rhs = self.expect_ident("attribute name")?;
        desugar_fd(self.schema, &name, &relation, &lhs, &rhs)
            .map_err(|e| self.reposition(e, &sp))
    }

    fn parse_nd(&mut self) -> Result<DenialConstraint, Error> {
        let name = self.expect_ident("constraint name")?;
        self.expect(Tok::Colon, "`:`")?;
        let sp = self.peek().clone();
        let relation = self.expect_ident("relation name")?;
        self.expect(Tok::Colon, "`:`")?;
        let lhs = self.parse_attrlist()?;
        self.expect(Tok::Arrow, "`->`")?;
        let bsp = self.next();
        let bound: u32 = match &bsp.tok {
            Tok::IntLit(s) => s
                .parse()
                .map_err(|_| Error::parse_at(bsp.line, bsp.col, format!("bad bound `{s}`")))?,
            _ => return self.err(&bsp, "expected a numeric bound"),
        };
        let rhs = self.expect_ident("attribute name")?;
        desugar_nd(self.schema, &name, &relation, &lhs, &rhs, bound)
            .map_err(|e| self.reposition(e, &sp))
    }

    fn parse_attrlist(&mut self) -> Result<Vec<String>, Error> {
        let mut attrs = vec![self.expect_ident("attribute name")?];
        while self.peek().tok == Tok::Comma {
            self.next();
            attrs.push(self.expect_ident("attribute name")?);
        }
        Ok(attrs)
    }

    fn reposition(&self, e: Error, sp: &Spanned) -> Error {
        match e {
            Error::Validation(msg) | Error::Model(msg) => Error::parse_at(sp.line, sp.col, msg),
            other => other,
        }
    }
}

/// Parses a constraint file against a schema.
pub fn parse_constraints(text: &str, schema: &Schema) -> Result<ConstraintSet, Error> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, schema };
    p.parse_file()
}

/// Builds the two-atom denial form of the FD `relation: lhs -> rhs`.
pub fn desugar_fd(
    schema: &Schema,
    name: &str,
    relation: &str,
    lhs: &[String],
    rhs: &str,
) -> Result<DenialConstraint, Error> {
    desugar_nd(schema, name, relation, lhs, rhs, 1)
}

/// Builds the (bound+1)-atom denial form of the numerical dependency
/// `relation: lhs ->bound rhs` (at most `bound` distinct rhs values per
/// lhs group). The guard is the disjunction of pairwise equalities over
/// rhs positions; bound 1 is the ordinary FD.
pub fn desugar_nd(
    schema: &Schema,
    name: &str,
    relation: &str,
    lhs: &[String],
    rhs: &str,
    bound: u32,
) -> Result<DenialConstraint, Error> {
    if bound < 1 {
        return Err(Error::Validation("dependency bound must be at least 1".into()));
    }
    let scheme = schema
        .relation(relation)
        .ok_or_else(|| Error::Validation(format!("unknown relation {relation}")))?;
    let mut lhs_pos = Vec::new();
    for a in lhs {
        let idx = scheme
            .attribute_index(a)
            .ok_or_else(|| Error::Validation(format!("unknown attribute {a} in {relation}")))?;
        if lhs_pos.contains(&idx) {
            return Err(Error::Validation(format!("attribute {a} repeated on the left side")));
        }
        lhs_pos.push(idx);
    }
    let rhs_pos = scheme
        .attribute_index(rhs)
        .ok_or_else(|| Error::Validation(format!("unknown attribute {rhs} in {relation}")))?;
    if lhs_pos.contains(&rhs_pos) {
        return Err(Error::Validation(format!(
            "attribute {rhs} cannot appear on both sides"
        )));
    }

    let k = bound as usize + 1;
    let mut atoms = Vec::new();
    for j in 0..k {
        let mut args = Vec::new();
        for (i, _) in scheme.attributes.iter().enumerate() {
            let var = if lhs_pos.contains(&i) {
                format!("x{i}")
            } else if i == rhs_pos {
                format!("y{j}")
            } else {
                format!("v{j}_{i}")
            };
            args.push(Term::Var(var));
        }
        atoms.push(RelationAtom {
            relation: relation.to_string(),
            args,
        });
    }
    let mut phi = Vec::new();
    for j in 0..k {
        for l in (j + 1)..k {
            phi.push(vec![Comparison {
                left: Term::Var(format!("y{j}")),
                op: CmpOp::Eq,
                right: Term::Var(format!("y{l}")),
            }]);
        }
    }
    Ok(DenialConstraint {
        name: name.to_string(),
        atoms,
        phi,
    })
}

// ---------------------------------------------------------------------------
// Pretty printing
// ---------------------------------------------------------------------------

fn render_value(v: &Value) -> String {
    match v {
        Value::Int(n) => n.to_string(),
        Value::Rat(r) => format!("{}/{}", r.numer(), r.denom()),
        Value::Text(s) => format!("\"{s}\""),
        Value::Date(d) => d.format("%Y-%m-%d").to_string(),
    }
}

fn render_term(t: &Term) -> String {
    match t {
        Term::Var(v) => v.clone(),
        Term::Const(c) => render_value(c),
    }
}

fn render_atom(a: &RelationAtom) -> String {
    let args: Vec<String> = a.args.iter().map(render_term).collect();
    format!("{}({})", a.relation, args.join(", "))
}

fn render_phi(phi: &[Conjunction]) -> String {
    phi.iter()
        .map(|conj| {
            conj.iter()
                .map(|c| {
                    format!(
                        "{} {} {}",
                        render_term(&c.left),
                        c.op.symbol(),
                        render_term(&c.right)
                    )
                })
                .collect::<Vec<_>>()
                .join(" & ")
        })
        .collect::<Vec<_>>()
        .join(" | ")
}

/// Canonical text form; `parse_constraints(pretty_print(cs))` is the
/// identity on the AST.
pub fn pretty_print(cs: &ConstraintSet) -> String {
    let mut out = String::new();
    for c in cs.iter() {
        let atoms: Vec<String> = c.atoms.iter().map(render_atom).collect();
        let _ = writeln!(
            out,
            "denial {}: {} -> {}",
            c.name,
            atoms.join(", "),
            render_phi(&c.phi)
        );
    }
    // Trailing guard space when phi is empty would be untidy.
    out.replace(" -> \n", " ->\n")
}

/// Renders each constraint in the disjunctive sentence form.
pub fn pretty_print_paper(cs: &ConstraintSet) -> String {
    let mut out = String::new();
    for c in cs.iter() {
        let mut parts: Vec<String> = c
            .atoms
            .iter()
            .map(|a| format!("\u{00ac}{}", render_atom(a)))
            .collect();
        if !c.phi.is_empty() {
            let phi = c
                .phi
                .iter()
                .map(|conj| {
                    let cs: Vec<String> = conj
                        .iter()
                        .map(|cmp| {
                            format!(
                                "{} {} {}",
                                render_term(&cmp.left),
                                cmp.op.symbol(),
                                render_term(&cmp.right)
                            )
                        })
                        .collect();
                    if cs.len() == 1 {
                        cs[0].clone()
                    } else {
                        format!("({})", cs.join(" \u{2227} "))
                    }
                })
                .collect::<Vec<_>>()
                .join(" \u{2228} ");
            parts.push(phi);
        }
        let _ = writeln!(out, "{}: [{}]", c.name, parts.join(" \u{2228} "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures_test::{mealticket_constraints, mealticket_db};

    #[test]
    fn example_constraints_parse() {
        let db = mealticket_db();
        let cs = mealticket_constraints(db.schema());
        assert_eq!(cs.len(), 4);
        let c1 = cs.get("c1").unwrap();
        assert_eq!(c1.arity(), 1);
        assert_eq!(c1.phi.len(), 1);
        let c2 = cs.get("c2").unwrap();
        assert_eq!(c2.arity(), 2);
        let c4 = cs.get("c4").unwrap();
        assert_eq!(c4.arity(), 3);
        assert_eq!(c4.phi.len(), 3);
    }

    #[test]
    fn pure_denial_has_empty_guard() {
        let db = mealticket_db();
        let cs = parse_constraints("denial p: MealTicket(a, b, c, d) ->", db.schema()).unwrap();
        assert!(cs.get("p").unwrap().phi.is_empty());
    }

    #[test]
    fn fd_sugar_matches_paper_shape() {
        let db = mealticket_db();
        let cs = parse_constraints("fd c3: MealTicket: Number -> Holder", db.schema()).unwrap();
        let c3 = cs.get("c3").unwrap();
        assert_eq!(c3.arity(), 2);
        // Shared variable on the Number position of both atoms.
        assert_eq!(c3.atoms[0].args[0], c3.atoms[1].args[0]);
        assert_ne!(c3.atoms[0].args[2], c3.atoms[1].args[2]);
        assert_eq!(c3.phi.len(), 1);
        assert_eq!(c3.phi[0].len(), 1);
        assert_eq!(c3.phi[0][0].op, CmpOp::Eq);
    }

    #[test]
    fn nd_bound_one_is_an_fd() {
        let db = mealticket_db();
        let fd = parse_constraints("fd a: MealTicket: Number -> Value", db.schema()).unwrap();
        let nd = parse_constraints("nd a: MealTicket: Number -> 1 Value", db.schema()).unwrap();
        assert_eq!(fd.get("a").unwrap().body(), nd.get("a").unwrap().body());
    }

    #[test]
    fn parse_errors_carry_position() {
        let db = mealticket_db();
        let e = parse_constraints("denial x: Nope(a) -> a > 0", db.schema()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }), "{e}");
        let e = parse_constraints(
            "denial x: MealTicket(a, b, c, d) -> q > 0",
            db.schema(),
        )
        .unwrap_err();
        assert!(format!("{e}").contains("q"), "{e}");
        let e = parse_constraints(
            "denial x: MealTicket(a, b, c, d) -> b > \"zero\"",
            db.schema(),
        )
        .unwrap_err();
        assert!(format!("{e}").contains("order comparison"), "{e}");
        let e = parse_constraints(
            "denial x: MealTicket(a, \"oops\", c, d) -> a > 0\n",
            db.schema(),
        )
        .unwrap_err();
        assert!(format!("{e}").contains("does not fit"), "{e}");
    }

    #[test]
    fn round_trip_on_example_constraints() {
        let db = mealticket_db();
        let cs = mealticket_constraints(db.schema());
        let printed = pretty_print(&cs);
        let reparsed = parse_constraints(&printed, db.schema()).unwrap();
        assert_eq!(cs, reparsed);
    }

    #[test]
    fn duplicate_names_rejected() {
        let db = mealticket_db();
        let e = parse_constraints(
            "fd c: MealTicket: Number -> Holder\nfd c: MealTicket: Number -> Value",
            db.schema(),
        );
        assert!(e.is_err());
    }
}
