//! Structural Verilog subset.
//!
//! Accepted: one `module ... endmodule`, `input`/`output`/`wire`
//! declarations (scalar or `[msb:lsb]` ranged), primitive instantiations
//! `and or xor xnor nand nor not buf` with the output connection first,
//! the cells `aoi21`/`oai21` with positional ports, and
//! `assign w = x;` / `assign w = 1'b0;` / `assign w = 1'b1;`.
//! Ranged declarations expand to wires named `name[i]`.

use std::collections::HashSet;
use std::fmt::Write;

use super::{GateType, Netlist, NetlistBuilder, NetlistError};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    Const(bool),
    Sym(char),
}

struct Token {
    tok: Tok,
    line: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, NetlistError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col_start = 0;
    let syntax = |line: usize, col: usize, msg: &str| NetlistError::Syntax {
        line,
        column: col,
        message: msg.to_owned(),
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            i += 1;
            col_start = i;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            loop {
                if i + 1 >= chars.len() {
                    return Err(syntax(line, i - col_start + 1, "unterminated comment"));
                }
                if chars[i] == '\n' {
                    line += 1;
                    col_start = i + 1;
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    i += 2;
                    break;
                }
                i += 1;
            }
            continue;
        }
        if c == '\\' {
            let start = i + 1;
            i = start;
            while i < chars.len() && !chars[i].is_whitespace() {
                i += 1;
            }
            if i == start {
                return Err(syntax(line, start - col_start, "empty escaped identifier"));
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '$')
            {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '\'') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            let tok = match lit.as_str() {
                "1'b0" | "1'h0" | "1'd0" => Tok::Const(false),
                "1'b1" | "1'h1" | "1'd1" => Tok::Const(true),
                _ if lit.chars().all(|c| c.is_ascii_digit()) => Tok::Number(lit),
                _ => {
                    return Err(NetlistError::UnsupportedVerilog { token: lit, line });
                }
            };
            out.push(Token { tok, line });
            continue;
        }
        if c.is_ascii_punctuation() {
            out.push(Token {
                tok: Tok::Sym(c),
                line,
            });
            i += 1;
            continue;
        }
        return Err(NetlistError::UnsupportedVerilog {
            token: c.to_string(),
            line,
        });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    builder: NetlistBuilder,
    declared: HashSet<String>,
    used: Vec<(String, usize)>,
    const_wires: [Option<String>; 2],
    fresh: usize,
}

const PRIMITIVES: [(&str, GateType); 10] = [
    ("and", GateType::And),
    ("or", GateType::Or),
    ("xor", GateType::Xor),
    ("xnor", GateType::Xnor),
    ("nand", GateType::Nand),
    ("nor", GateType::Nor),
    ("not", GateType::Not),
    ("buf", GateType::Buf),
    ("aoi21", GateType::Aoi21),
    ("oai21", GateType::Oai21),
];

impl Parser {
    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map_or(1, |t| t.line)
    }

    fn syntax(&self, message: impl Into<String>) -> NetlistError {
        NetlistError::Syntax {
            line: self.line(),
            column: 0,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Result<Tok, NetlistError> {
        let t = self
            .toks
            .get(self.pos)
            .map(|t| t.tok.clone())
            .ok_or_else(|| self.syntax("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), NetlistError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<String, NetlistError> {
        match self.next()? {
            Tok::Ident(s) => Ok(s),
            other => {
                self.pos -= 1;
                Err(self.syntax(format!("expected identifier, found {other:?}")))
            }
        }
    }

    fn number(&mut self) -> Result<usize, NetlistError> {
        match self.next()? {
            Tok::Number(s) => s.parse().map_err(|_| self.syntax("number out of range")),
            _ => {
                self.pos -= 1;
                Err(self.syntax("expected a number"))
            }
        }
    }

    fn net_ref(&mut self) -> Result<String, NetlistError> {
        if let Some(Tok::Const(bit)) = self.peek().cloned() {
            self.pos += 1;
            return Ok(self.const_wire(bit));
        }
        let line = self.line();
        let base = self.ident()?;
        let name = if self.eat('[') {
            let idx = self.number()?;
            self.expect(']')?;
            format!("{base}[{idx}]")
        } else {
            base
        };
        self.used.push((name.clone(), line));
        Ok(name)
    }

    fn const_wire(&mut self, bit: bool) -> String {
        if let Some(w) = &self.const_wires[bit as usize] {
            return w.clone();
        }
        let name = format!("$const{}", bit as u8);
        let kind = if bit { GateType::Const1 } else { GateType::Const0 };
        self.builder
            .add_gate(&name, kind, &[])
            .expect("constant gate has no inputs");
        self.declared.insert(name.clone());
        self.const_wires[bit as usize] = Some(name.clone());
        name
    }

    fn declaration(&mut self, kind: &str) -> Result<(), NetlistError> {
        let range = if self.eat('[') {
            let msb = self.number()?;
            self.expect(':')?;
            let lsb = self.number()?;
            self.expect(']')?;
            Some((msb.min(lsb), msb.max(lsb)))
        } else {
            None
        };
        loop {
            let base = self.ident()?;
            let names: Vec<String> = match range {
                Some((lo, hi)) => (lo..=hi).map(|i| format!("{base}[{i}]")).collect(),
                None => vec![base],
            };
            for n in names {
                match kind {
                    "input" => {
                        self.builder.add_input(&n)?;
                    }
                    "output" => {
                        self.builder.add_output(&n)?;
                    }
                    _ => {}
                }
                if !self.declared.insert(n.clone()) && kind != "wire" {
                    // `output z; wire z;` is legal, a second input/output is not
                    return Err(NetlistError::DuplicateDeclaration(n));
                }
            }
            if !self.eat(',') {
                break;
            }
            if matches!(self.peek(), Some(Tok::Ident(s)) if s == "input" || s == "output" || s == "wire") {
                break;
            }
        }
        Ok(())
    }

    fn instance(&mut self, kind: GateType) -> Result<(), NetlistError> {
        if matches!(self.peek(), Some(Tok::Ident(_))) {
            self.ident()?;
        }
        self.expect('(')?;
        if self.peek() == Some(&Tok::Sym('.')) {
            return Err(NetlistError::UnsupportedVerilog {
                token: "named port connection".into(),
                line: self.line(),
            });
        }
        let mut conns = vec![self.net_ref()?];
        while self.eat(',') {
            conns.push(self.net_ref()?);
        }
        self.expect(')')?;
        self.expect(';')?;
        let out = conns.remove(0);
        let ins = conns;
        let line = self.line();
        let binary = matches!(
            kind,
            GateType::And | GateType::Or | GateType::Xor | GateType::Nand | GateType::Nor | GateType::Xnor
        );
        if binary && ins.len() > 2 {
            // n-ary primitive: fold all but the last input with the
            // non-inverting operator
            let base = match kind {
                GateType::And | GateType::Nand => GateType::And,
                GateType::Or | GateType::Nor => GateType::Or,
                _ => GateType::Xor,
            };
            let mut acc = ins[0].clone();
            for x in &ins[1..ins.len() - 1] {
                let t = format!("{out}$t{}", self.fresh);
                self.fresh += 1;
                self.builder.add_gate(&t, base, &[&acc, x])?;
                self.declared.insert(t.clone());
                acc = t;
            }
            self.builder.add_gate(&out, kind, &[&acc, &ins[ins.len() - 1]])?;
            return Ok(());
        }
        if ins.len() != kind.arity() {
            return Err(NetlistError::Syntax {
                line,
                column: 0,
                message: format!("{kind} takes {} input(s), got {}", kind.arity(), ins.len()),
            });
        }
        let ins: Vec<&str> = ins.iter().map(String::as_str).collect();
        self.builder.add_gate(&out, kind, &ins)?;
        Ok(())
    }

    fn assign(&mut self) -> Result<(), NetlistError> {
        let lhs = self.net_ref()?;
        self.expect('=')?;
        let line = self.line();
        let rhs = match self.peek().cloned() {
            Some(Tok::Const(bit)) => {
                self.pos += 1;
                self.expect(';').map_err(|_| NetlistError::UnsupportedVerilog {
                    token: "assign expression".into(),
                    line,
                })?;
                let kind = if bit { GateType::Const1 } else { GateType::Const0 };
                self.builder.add_gate(&lhs, kind, &[])?;
                return Ok(());
            }
            Some(Tok::Ident(_)) => self.net_ref()?,
            _ => {
                return Err(NetlistError::UnsupportedVerilog {
                    token: "assign expression".into(),
                    line,
                })
            }
        };
        if !self.eat(';') {
            return Err(NetlistError::UnsupportedVerilog {
                token: "assign expression".into(),
                line,
            });
        }
        self.builder.add_gate(&lhs, GateType::Buf, &[&rhs])?;
        Ok(())
    }

    fn module(mut self) -> Result<Netlist, NetlistError> {
        match self.next()? {
            Tok::Ident(k) if k == "module" => {}
            Tok::Ident(k) => {
                return Err(NetlistError::UnsupportedVerilog {
                    token: k,
                    line: self.line(),
                })
            }
            _ => return Err(self.syntax("expected `module`")),
        }
        self.ident()?;
        if self.eat('(') && !self.eat(')') {
            loop {
                match self.peek().cloned() {
                    Some(Tok::Ident(k)) if k == "input" || k == "output" || k == "wire" => {
                        self.pos += 1;
                        self.declaration(&k)?;
                        if self.eat(')') {
                            break;
                        }
                        continue;
                    }
                    _ => {
                        self.ident()?;
                    }
                }
                if self.eat(')') {
                    break;
                }
                self.expect(',')?;
            }
        }
        self.expect(';')?;
        loop {
            let line = self.line();
            let word = match self.next()? {
                Tok::Ident(w) => w,
                Tok::Sym(';') => continue,
                other => return Err(self.syntax(format!("unexpected {other:?}"))),
            };
            match word.as_str() {
                "endmodule" => break,
                "input" | "output" | "wire" => {
                    self.declaration(&word)?;
                    self.expect(';')?;
                }
                "assign" => self.assign()?,
                w => {
                    if let Some(&(_, kind)) = PRIMITIVES.iter().find(|(p, _)| *p == w) {
                        self.instance(kind)?;
                    } else {
                        return Err(NetlistError::UnsupportedVerilog { token: word, line });
                    }
                }
            }
        }
        if let Some(t) = self.toks.get(self.pos) {
            let token = match &t.tok {
                Tok::Ident(s) | Tok::Number(s) => s.clone(),
                other => format!("{other:?}"),
            };
            return Err(NetlistError::UnsupportedVerilog { token, line: t.line });
        }
        for (name, _) in &self.used {
            if !self.declared.contains(name) {
                return Err(NetlistError::UndeclaredWire(name.clone()));
            }
        }
        self.builder.build()
    }
}

pub fn parse_structural_verilog(text: &str) -> Result<Netlist, NetlistError> {
    let parser = Parser {
        toks: tokenize(text)?,
        pos: 0,
        builder: NetlistBuilder::new(),
        declared: HashSet::new(),
        used: Vec::new(),
        const_wires: [None, None],
        fresh: 0,
    };
    parser.module()
}

fn is_simple_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$')
        && !is_keyword(s)
}

fn is_keyword(s: &str) -> bool {
    matches!(
        s,
        "module" | "endmodule" | "input" | "output" | "wire" | "assign" | "reg" | "always"
    ) || PRIMITIVES.iter().any(|(p, _)| *p == s)
}

fn split_bit(s: &str) -> Option<(&str, usize)> {
    let open = s.find('[')?;
    let idx = s.strip_suffix(']')?[open + 1..].parse().ok()?;
    let base = &s[..open];
    is_simple_ident(base).then_some((base, idx))
}

/// A declaration item: either a whole bus `[hi:lo] base` or one wire.
enum Decl {
    Bus { base: String, lo: usize, hi: usize },
    Wire(String),
}

fn escape(name: &str, buses: &HashSet<String>) -> String {
    if is_simple_ident(name) {
        return name.to_owned();
    }
    match split_bit(name) {
        Some((base, idx)) if buses.contains(base) => format!("{base}[{idx}]"),
        _ => format!("\\{name} "),
    }
}

/// Groups consecutive ascending runs `b[lo]..b[hi]` into bus declarations
/// when no other category mentions `b`.
fn group(names: &[String], foreign: &HashSet<String>) -> Vec<Decl> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < names.len() {
        if let Some((base, lo)) = split_bit(&names[i]) {
            let mut j = i + 1;
            while j < names.len() && split_bit(&names[j]) == Some((base, lo + (j - i))) {
                j += 1;
            }
            let claimed = names.iter().enumerate().any(|(k, n)| {
                (k < i || k >= j) && (n == base || split_bit(n).is_some_and(|(b, _)| b == base))
            });
            if !claimed && !foreign.contains(base) {
                out.push(Decl::Bus {
                    base: base.to_owned(),
                    lo,
                    hi: lo + (j - i) - 1,
                });
                i = j;
                continue;
            }
        }
        out.push(Decl::Wire(names[i].clone()));
        i += 1;
    }
    out
}

pub(super) fn write_verilog(n: &Netlist, module: &str) -> String {
    let names =
        |vs: &[crate::poly::VarId]| -> Vec<String> { vs.iter().map(|&v| n.name(v).to_owned()).collect() };
    let inputs = names(n.primary_inputs());
    let outputs = names(n.primary_outputs());
    let wires: Vec<String> = n
        .gates()
        .iter()
        .map(|g| g.output)
        .filter(|&v| !n.is_primary_output(v))
        .map(|v| n.name(v).to_owned())
        .collect();
    let bases = |list: &[String]| -> HashSet<String> {
        list.iter()
            .map(|s| split_bit(s).map_or(s.clone(), |(b, _)| b.to_owned()))
            .collect()
    };
    let (bi, bo, bw) = (bases(&inputs), bases(&outputs), bases(&wires));
    let union =
        |a: &HashSet<String>, b: &HashSet<String>| -> HashSet<String> { a.union(b).cloned().collect() };
    let di = group(&inputs, &union(&bo, &bw));
    let do_ = group(&outputs, &union(&bi, &bw));
    let dw = group(&wires, &union(&bi, &bo));

    let buses: HashSet<String> = di
        .iter()
        .chain(&do_)
        .chain(&dw)
        .filter_map(|d| match d {
            Decl::Bus { base, .. } => Some(base.clone()),
            Decl::Wire(_) => None,
        })
        .collect();
    let none = HashSet::new();
    let port = |d: &Decl| match d {
        Decl::Bus { base, .. } => base.clone(),
        Decl::Wire(w) => escape(w, &none),
    };
    let decl = |d: &Decl| match d {
        Decl::Bus { base, lo, hi } => format!("[{hi}:{lo}] {base}"),
        Decl::Wire(w) => escape(w, &none),
    };
    let mut s = String::new();
    let ports: Vec<String> = di.iter().chain(&do_).map(port).collect();
    let _ = writeln!(s, "module {} ({});", escape(module, &none), ports.join(", "));
    for (kw, list) in [("input", &di), ("output", &do_), ("wire", &dw)] {
        for d in list.iter() {
            let _ = writeln!(s, "  {kw} {};", decl(d));
        }
    }
    for (k, g) in n.gates().iter().enumerate() {
        let out = escape(n.name(g.output), &buses);
        match g.kind {
            GateType::Const0 => {
                let _ = writeln!(s, "  assign {out} = 1'b0;");
            }
            GateType::Const1 => {
                let _ = writeln!(s, "  assign {out} = 1'b1;");
            }
            kind => {
                let prim = PRIMITIVES
                    .iter()
                    .find(|(_, t)| *t == kind)
                    .map(|(p, _)| *p)
                    .expect("every non-constant gate has a primitive");
                let mut conns = vec![out];
                conns.extend(g.inputs.iter().map(|&u| escape(n.name(u), &buses)));
                let _ = writeln!(s, "  {prim} g{k} ({});", conns.join(", "));
            }
        }
    }
    s.push_str("endmodule\n");
    s
}
