use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ParseErrorKind;

/// Statement or goal structure: a head symbol and ordered children.
///
/// Application `f a b` is the node `f` with children `[a, b]`; binary
/// operators are nodes named by the operator; binders (`forall`, `exists`,
/// `fun`) carry the body as first child followed by one node per bound
/// variable (with its type as only child when annotated).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TermTree {
    pub symbol: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<TermTree>,
}

const BINDERS: &[&str] = &["forall", "exists", "fun"];
pub(crate) const APP: &str = "@app";
const PAIR: &str = "pair";
const CAST: &str = ":";
const LIST: &str = "[::]";

impl TermTree {
    pub fn leaf(symbol: impl Into<String>) -> Self {
        Self {
            symbol: symbol.into(),
            children: Vec::new(),
        }
    }

    pub fn node(symbol: impl Into<String>, children: Vec<TermTree>) -> Self {
        Self {
            symbol: symbol.into(),
            children,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn is_binder(&self) -> bool {
        BINDERS.contains(&self.symbol.as_str()) && !self.children.is_empty()
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(TermTree::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(TermTree::depth).max().unwrap_or(0)
    }

    /// Symbols in pre-order.
    pub fn symbols(&self) -> Vec<&str> {
        let mut out = Vec::with_capacity(self.size());
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.push(t.symbol.as_str());
            stack.extend(t.children.iter().rev());
        }
        out
    }

    /// Root symbol, leftmost child and second child.
    pub fn top_symbols(&self) -> [Option<&str>; 3] {
        [
            Some(self.symbol.as_str()),
            self.children.first().map(|c| c.symbol.as_str()),
            self.children.get(1).map(|c| c.symbol.as_str()),
        ]
    }

    /// Variables bound by a leading `forall`.
    pub fn leading_binders(&self) -> Vec<String> {
        if self.symbol == "forall" && self.is_binder() {
            self.children[1..]
                .iter()
                .map(|b| b.symbol.clone())
                .collect()
        } else {
            Vec::new()
        }
    }

    fn is_operator(&self) -> bool {
        !self
            .symbol
            .starts_with(|c: char| c.is_alphanumeric() || c == '_' || c == '\'' || c == '\\')
            || self.symbol == "\\in"
            || self.symbol == "\\notin"
            || self.symbol == "\\subset"
    }

    fn print_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_leaf() {
            write!(f, "{}", self.symbol)
        } else {
            write!(f, "({self})")
        }
    }
}

impl fmt::Display for TermTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = self.symbol.as_str();
        let kids = &self.children;
        if kids.is_empty() {
            return if sym == LIST {
                write!(f, "[::]")
            } else {
                write!(f, "{sym}")
            };
        }
        if self.is_binder() {
            write!(f, "{sym}")?;
            for b in &kids[1..] {
                match b.children.first() {
                    Some(ty) => write!(f, " ({} : {ty})", b.symbol)?,
                    None => write!(f, " {}", b.symbol)?,
                }
            }
            let sep = if sym == "fun" { " =>" } else { "," };
            return write!(f, "{sep} {}", kids[0]);
        }
        match sym {
            LIST => {
                write!(f, "[:: ")?;
                for (i, k) in kids.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{k}")?;
                }
                write!(f, "]")
            }
            PAIR => {
                write!(f, "(")?;
                for (i, k) in kids.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{k}")?;
                }
                write!(f, ")")
            }
            CAST if kids.len() == 2 => write!(f, "({} : {})", kids[0], kids[1]),
            "[]" if kids.len() == 1 => write!(f, "[{}]", kids[0]),
            APP => {
                for (i, k) in kids.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    k.print_atom(f)?;
                }
                Ok(())
            }
            _ if sym.starts_with('.') || sym == "`!" => {
                kids[0].print_atom(f)?;
                write!(f, "{sym}")
            }
            _ if self.is_operator() && kids.len() == 1 => {
                write!(f, "{sym} ")?;
                kids[0].print_atom(f)
            }
            _ if self.is_operator() && kids.len() == 2 => {
                kids[0].print_atom(f)?;
                write!(f, " {sym} ")?;
                kids[1].print_atom(f)
            }
            _ => {
                write!(f, "{sym}")?;
                for k in kids {
                    write!(f, " ")?;
                    k.print_atom(f)?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Op(String),
    Postfix(String),
    LParen,
    RParen,
    ListOpen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Num(s) | Tok::Op(s) | Tok::Postfix(s) => s.clone(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::ListOpen => "[::".into(),
            Tok::LBracket => "[".into(),
            Tok::RBracket => "]".into(),
            Tok::Comma => ",".into(),
            Tok::Semi => ";".into(),
            Tok::Colon => ":".into(),
        }
    }
}

const SYMBOL_CHARS: &str = "!#$%&*+-/<=>?@^|~:\\";
const BACKSLASH_INFIX: &[&str] = &["\\in", "\\notin", "\\subset", "\\o"];

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<Tok>, ParseErrorKind> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            toks.push(Tok::Num(chars[start..i].iter().collect()));
        } else if c.is_alphabetic()
            || c == '_'
            || c == '\''
            || (c == '\\' && next.is_some_and(char::is_alphabetic))
        {
            let start = i;
            i += 1;
            while i < chars.len() {
                let ch = chars[i];
                let qualified = ch == '.'
                    && chars
                        .get(i + 1)
                        .is_some_and(|n| n.is_alphabetic() || *n == '_');
                if ident_char(ch) || qualified {
                    i += 1;
                } else {
                    break;
                }
            }
            let word: String = chars[start..i].iter().collect();
            if BACKSLASH_INFIX.contains(&word.as_str()) {
                toks.push(Tok::Op(word));
            } else {
                toks.push(Tok::Ident(word));
            }
        } else if c == '.' {
            // `.+1`, `.-1`, `.1` postfix notations
            let start = i;
            i += 1;
            if i < chars.len() && (chars[i] == '+' || chars[i] == '-' || chars[i] == '*') {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i == start + 1 {
                return Err(ParseErrorKind::UnexpectedToken(".".into()));
            }
            toks.push(Tok::Postfix(chars[start..i].iter().collect()));
        } else if c == '`' && next == Some('!') {
            toks.push(Tok::Postfix("`!".into()));
            i += 2;
        } else if c == '%' && next.is_some_and(char::is_alphabetic) {
            // notation scope delimiter such as `%Z`
            i += 1;
            while i < chars.len() && chars[i].is_alphanumeric() {
                i += 1;
            }
        } else if c == '(' {
            toks.push(Tok::LParen);
            i += 1;
        } else if c == ')' {
            toks.push(Tok::RParen);
            i += 1;
        } else if c == '[' {
            if next == Some(':') && chars.get(i + 2) == Some(&':') {
                toks.push(Tok::ListOpen);
                i += 3;
            } else {
                toks.push(Tok::LBracket);
                i += 1;
            }
        } else if c == ']' {
            toks.push(Tok::RBracket);
            i += 1;
        } else if c == ',' {
            toks.push(Tok::Comma);
            i += 1;
        } else if c == ';' {
            toks.push(Tok::Semi);
            i += 1;
        } else if c == '*'
            && next == Some('m')
            && !chars.get(i + 2).copied().is_some_and(ident_char)
        {
            toks.push(Tok::Op("*m".into()));
            i += 2;
        } else if SYMBOL_CHARS.contains(c) {
            let start = i;
            while i < chars.len() && SYMBOL_CHARS.contains(chars[i]) {
                if chars[i] == '\\' && chars.get(i + 1).is_some_and(|n| n.is_alphabetic()) {
                    break;
                }
                i += 1;
            }
            let op: String = chars[start..i].iter().collect();
            if op == ":" {
                toks.push(Tok::Colon);
            } else {
                toks.push(Tok::Op(op));
            }
        } else {
            return Err(ParseErrorKind::UnexpectedToken(c.to_string()));
        }
    }
    Ok(toks)
}

fn check_balance(toks: &[Tok]) -> Result<(), ParseErrorKind> {
    let mut stack = Vec::new();
    for t in toks {
        match t {
            Tok::LParen => stack.push(Tok::RParen),
            Tok::LBracket | Tok::ListOpen => stack.push(Tok::RBracket),
            Tok::RParen | Tok::RBracket if stack.pop().as_ref() != Some(t) => {
                return Err(ParseErrorKind::UnbalancedDelimiters);
            }
            _ => {}
        }
    }
    if stack.is_empty() {
        Ok(())
    } else {
        Err(ParseErrorKind::UnbalancedDelimiters)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Assoc {
    Left,
    Right,
}

/// Binding power of a binary operator, loosest first.
fn binary_level(op: &str) -> (u8, Assoc) {
    match op {
        "->" | "<->" => (1, Assoc::Right),
        "||" | "\\/" => (2, Assoc::Left),
        "&&" | "/\\" => (3, Assoc::Left),
        "+" | "-" => (5, Assoc::Left),
        "++" | "::" => (5, Assoc::Right),
        "*" | "*m" | "%/" | "%%" => (6, Assoc::Left),
        "^" | "^+" => (7, Assoc::Right),
        // `=`, `==`, comparisons and any other notation
        _ => (4, Assoc::Left),
    }
}

const PREFIX_OPS: &[&str] = &["~~", "~", "-", "@"];

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseErrorKind> {
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(ParseErrorKind::UnexpectedToken(t.text())),
            None => Err(ParseErrorKind::UnexpectedToken("<end>".into())),
        }
    }

    fn expr(&mut self) -> Result<TermTree, ParseErrorKind> {
        self.binary(1)
    }

    fn binary(&mut self, min_level: u8) -> Result<TermTree, ParseErrorKind> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Op(op)) if !PREFIX_OPS.contains(&op.as_str()) || op == "-" => op.clone(),
                _ => break,
            };
            if op == "=>" {
                break;
            }
            let (level, assoc) = binary_level(&op);
            if level < min_level {
                break;
            }
            self.bump();
            let next_min = if assoc == Assoc::Left {
                level + 1
            } else {
                level
            };
            let rhs = self.binary(next_min)?;
            lhs = TermTree::node(op, vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<TermTree, ParseErrorKind> {
        match self.peek() {
            Some(Tok::Op(op)) if PREFIX_OPS.contains(&op.as_str()) => {
                let op = op.clone();
                self.bump();
                let arg = self.unary()?;
                if op == "@" {
                    return Ok(arg);
                }
                Ok(TermTree::node(op, vec![arg]))
            }
            Some(Tok::Ident(w)) if BINDERS.contains(&w.as_str()) => self.binder(),
            _ => self.application(),
        }
    }

    fn binder(&mut self) -> Result<TermTree, ParseErrorKind> {
        let kw = match self.bump() {
            Some(Tok::Ident(w)) => w,
            _ => unreachable!(),
        };
        let mut vars: Vec<TermTree> = Vec::new();
        let mut untyped_from = 0;
        loop {
            match self.peek().cloned() {
                Some(Tok::Ident(v)) if !BINDERS.contains(&v.as_str()) => {
                    self.bump();
                    vars.push(TermTree::leaf(v));
                }
                Some(Tok::LParen) => {
                    self.bump();
                    let mut group = Vec::new();
                    while let Some(Tok::Ident(v)) = self.peek().cloned() {
                        self.bump();
                        group.push(v);
                    }
                    if group.is_empty() {
                        return Err(ParseErrorKind::UnexpectedToken(
                            self.peek().map_or("<end>".into(), Tok::text),
                        ));
                    }
                    let ty = if self.peek() == Some(&Tok::Colon) {
                        self.bump();
                        Some(self.expr()?)
                    } else {
                        None
                    };
                    self.expect(Tok::RParen)?;
                    for v in group {
                        vars.push(TermTree::node(v, ty.iter().cloned().collect()));
                    }
                    untyped_from = vars.len();
                }
                Some(Tok::Colon) => {
                    self.bump();
                    let ty = self.expr()?;
                    for v in &mut vars[untyped_from..] {
                        v.children = vec![ty.clone()];
                    }
                    untyped_from = vars.len();
                }
                Some(Tok::Comma) if kw != "fun" => {
                    self.bump();
                    break;
                }
                Some(Tok::Op(op)) if op == "=>" && kw == "fun" => {
                    self.bump();
                    break;
                }
                Some(t) => return Err(ParseErrorKind::UnexpectedToken(t.text())),
                None => return Err(ParseErrorKind::UnexpectedToken("<end>".into())),
            }
        }
        if vars.is_empty() {
            return Err(ParseErrorKind::UnexpectedToken(kw));
        }
        let body = self.expr()?;
        let mut children = vec![body];
        children.extend(vars);
        Ok(TermTree::node(kw, children))
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(w)) => !BINDERS.contains(&w.as_str()),
            Some(Tok::Num(_)) | Some(Tok::LParen) | Some(Tok::ListOpen) | Some(Tok::LBracket) => {
                true
            }
            _ => false,
        }
    }

    fn application(&mut self) -> Result<TermTree, ParseErrorKind> {
        let head = self.postfix()?;
        let mut args = Vec::new();
        while self.starts_atom() {
            args.push(self.postfix()?);
        }
        if args.is_empty() {
            return Ok(head);
        }
        Ok(apply(head, args))
    }

    fn postfix(&mut self) -> Result<TermTree, ParseErrorKind> {
        let mut t = self.atom()?;
        while let Some(Tok::Postfix(p)) = self.peek().cloned() {
            self.bump();
            t = TermTree::node(p, vec![t]);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<TermTree, ParseErrorKind> {
        match self.bump() {
            Some(Tok::Ident(w)) | Some(Tok::Num(w)) => Ok(TermTree::leaf(w)),
            Some(Tok::LParen) => {
                let first = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(first),
                    Some(Tok::Comma) => {
                        let mut items = vec![first, self.expr()?];
                        loop {
                            match self.bump() {
                                Some(Tok::Comma) => items.push(self.expr()?),
                                Some(Tok::RParen) => break,
                                Some(t) => return Err(ParseErrorKind::UnexpectedToken(t.text())),
                                None => return Err(ParseErrorKind::UnbalancedDelimiters),
                            }
                        }
                        Ok(TermTree::node(PAIR, items))
                    }
                    Some(Tok::Colon) => {
                        let ty = self.expr()?;
                        self.expect(Tok::RParen)?;
                        Ok(TermTree::node(CAST, vec![first, ty]))
                    }
                    Some(t) => Err(ParseErrorKind::UnexpectedToken(t.text())),
                    None => Err(ParseErrorKind::UnbalancedDelimiters),
                }
            }
            Some(Tok::ListOpen) => {
                let mut items = Vec::new();
                if self.peek() == Some(&Tok::RBracket) {
                    self.bump();
                    return Ok(TermTree::leaf(LIST));
                }
                loop {
                    items.push(self.expr()?);
                    match self.bump() {
                        Some(Tok::Semi) => {}
                        Some(Tok::RBracket) => break,
                        Some(t) => return Err(ParseErrorKind::UnexpectedToken(t.text())),
                        None => return Err(ParseErrorKind::UnbalancedDelimiters),
                    }
                }
                Ok(TermTree::node(LIST, items))
            }
            Some(Tok::LBracket) => {
                // `[a * _]`-style patterns inside terms are kept as a list
                let inner = self.expr()?;
                self.expect(Tok::RBracket)?;
                Ok(TermTree::node("[]", vec![inner]))
            }
            Some(t) => Err(ParseErrorKind::UnexpectedToken(t.text())),
            None => Err(ParseErrorKind::UnexpectedToken("<end>".into())),
        }
    }
}

fn is_plain_ident(sym: &str) -> bool {
    sym.starts_with(|c: char| c.is_alphabetic() || c == '_' || c == '\'' || c == '\\')
        && !BINDERS.contains(&sym)
        && !BACKSLASH_INFIX.contains(&sym)
}

fn apply(head: TermTree, args: Vec<TermTree>) -> TermTree {
    if is_plain_ident(&head.symbol) || head.symbol == APP {
        let mut head = head;
        head.children.extend(args);
        head
    } else {
        let mut children = vec![head];
        children.extend(args);
        TermTree::node(APP, children)
    }
}

/// Parse the statement of a lemma (the text after its `:`).
pub fn parse_term_tree(statement_text: &str) -> Result<TermTree, ParseErrorKind> {
    let toks = lex(statement_text)?;
    if toks.is_empty() {
        return Err(ParseErrorKind::EmptyStatement);
    }
    check_balance(&toks)?;
    let mut p = Parser { toks, pos: 0 };
    let tree = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(ParseErrorKind::UnexpectedToken(t.text()));
    }
    Ok(tree)
}
