//! Line-oriented equation format:
//!
//! ```text
//! # comment
//! inputs a0 a1 b0 b1
//! outputs z0 z1
//! i1 = NAND(a0, b0)
//! z0 = XOR(i1, i2)
//! ```
//!
//! `inputs`/`outputs` may repeat; declarations accumulate in order.

use std::fmt::Write;

use super::{GateType, Netlist, NetlistBuilder, NetlistError};

fn is_name_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '=' | '(' | ')' | ',' | '#')
}

struct Line<'a> {
    text: &'a str,
    pos: usize,
    number: usize,
}

impl<'a> Line<'a> {
    fn err(&self, message: impl Into<String>) -> NetlistError {
        NetlistError::Syntax {
            line: self.number,
            column: self.text[..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    fn name(&mut self) -> Result<&'a str, NetlistError> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest.find(|c| !is_name_char(c)).unwrap_or(rest.len());
        if len == 0 {
            return Err(self.err("expected a wire name"));
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    fn expect(&mut self, c: char) -> Result<(), NetlistError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn peek(&mut self, c: char) -> bool {
        self.skip_ws();
        self.text[self.pos..].starts_with(c)
    }
}

pub fn parse_equations(text: &str) -> Result<Netlist, NetlistError> {
    let mut b = NetlistBuilder::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut line = Line {
            text: body,
            pos: 0,
            number: i + 1,
        };
        if line.at_end() {
            continue;
        }
        let first = line.name()?;
        match first {
            "inputs" | "outputs" if !line.peek('=') => {
                while !line.at_end() {
                    let n = line.name()?;
                    if first == "inputs" {
                        b.add_input(n)?;
                    } else {
                        b.add_output(n)?;
                    }
                }
            }
            out => {
                line.expect('=')?;
                let cell_col = line.pos;
                let cell = line.name()?;
                let kind = GateType::from_name(cell).map_err(|_| NetlistError::UnsupportedGate {
                    cell: cell.to_owned(),
                    line: line.number,
                })?;
                line.expect('(')?;
                let mut args = Vec::new();
                if !line.peek(')') {
                    loop {
                        args.push(line.name()?);
                        if line.peek(',') {
                            line.expect(',')?;
                        } else {
                            break;
                        }
                    }
                }
                line.expect(')')?;
                if !line.at_end() {
                    return Err(line.err("unexpected text after gate"));
                }
                if args.len() != kind.arity() {
                    line.pos = cell_col;
                    line.skip_ws();
                    return Err(line.err(format!(
                        "{} takes {} input(s), got {}",
                        kind,
                        kind.arity(),
                        args.len()
                    )));
                }
                b.add_gate(out, kind, &args)?;
            }
        }
    }
    b.build()
}

pub(super) fn write_equations(n: &Netlist) -> String {
    let mut s = String::new();
    let join =
        |vs: &[crate::poly::VarId]| -> String { vs.iter().map(|&v| n.name(v)).collect::<Vec<_>>().join(" ") };
    if !n.primary_inputs().is_empty() {
        let _ = writeln!(s, "inputs {}", join(n.primary_inputs()));
    }
    if !n.primary_outputs().is_empty() {
        let _ = writeln!(s, "outputs {}", join(n.primary_outputs()));
    }
    for g in n.gates() {
        let args: Vec<&str> = g.inputs.iter().map(|&v| n.name(v)).collect();
        let _ = writeln!(s, "{} = {}({})", n.name(g.output), g.kind, args.join(", "));
    }
    s
}
