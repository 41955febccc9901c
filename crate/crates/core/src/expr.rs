//! Boundary-data expression language.
//!
//! Grammar (whitespace insensitive, byte offsets in errors):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' factor)?
//! base   := number | 'u' | 'v' | func '(' expr ')' | '(' expr ')' | '-' base
//! func   := sin | cos | exp | tanh | sqrt | log
//! ```

use crate::error::ExprError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Tanh,
    Sqrt,
    Log,
}

impl Func {
    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Exp => x.exp(),
            Func::Tanh => x.tanh(),
            Func::Sqrt => x.sqrt(),
            Func::Log => x.ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Number(f64),
    Var(char),
    Unary(Box<Node>),
    Call(Func, Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    /// Division carries the byte offset of the `/` for error reporting.
    Div(Box<Node>, Box<Node>, usize),
    Pow(Box<Node>, Box<Node>),
}

/// A parsed expression over the variables `u` and `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
}

impl Expression {
    pub fn eval(&self, u: f64, v: f64) -> Result<f64, ExprError> {
        eval_node(&self.root, u, v)
    }

    /// Whether the expression references the given variable.
    pub fn uses_variable(&self, var: char) -> bool {
        uses(&self.root, var)
    }

    /// Canonical fully parenthesized rendering; `parse_expression` of the
    /// output reproduces the tree.
    pub fn to_text(&self) -> String {
        print_node(&self.root)
    }
}

fn uses(n: &Node, var: char) -> bool {
    match n {
        Node::Number(_) => false,
        Node::Var(c) => *c == var,
        Node::Unary(a) | Node::Call(_, a) => uses(a, var),
        Node::Add(a, b)
        | Node::Sub(a, b)
        | Node::Mul(a, b)
        | Node::Div(a, b, _)
        | Node::Pow(a, b) => uses(a, var) || uses(b, var),
    }
}

fn eval_node(n: &Node, u: f64, v: f64) -> Result<f64, ExprError> {
    Ok(match n {
        Node::Number(x) => *x,
        Node::Var('u') => u,
        Node::Var('v') => v,
        Node::Var(_) => unreachable!("parser only admits u and v"),
        Node::Unary(a) => -eval_node(a, u, v)?,
        Node::Call(f, a) => f.apply(eval_node(a, u, v)?),
        Node::Add(a, b) => eval_node(a, u, v)? + eval_node(b, u, v)?,
        Node::Sub(a, b) => eval_node(a, u, v)? - eval_node(b, u, v)?,
        Node::Mul(a, b) => eval_node(a, u, v)? * eval_node(b, u, v)?,
        Node::Div(a, b, offset) => {
            let den = eval_node(b, u, v)?;
            if den == 0.0 {
                return Err(ExprError::DivisionByZero { offset: *offset });
            }
            eval_node(a, u, v)? / den
        }
        Node::Pow(a, b) => eval_node(a, u, v)?.powf(eval_node(b, u, v)?),
    })
}

fn print_node(n: &Node) -> String {
    match n {
        Node::Number(x) => {
            if *x < 0.0 {
                format!("({x})")
            } else {
                format!("{x}")
            }
        }
        Node::Var(c) => c.to_string(),
        Node::Unary(a) => format!("(-{})", print_node(a)),
        Node::Call(f, a) => {
            let name = match f {
                Func::Sin => "sin",
                Func::Cos => "cos",
                Func::Exp => "exp",
                Func::Tanh => "tanh",
                Func::Sqrt => "sqrt",
                Func::Log => "log",
            };
            format!("{name}({})", print_node(a))
        }
        Node::Add(a, b) => format!("({}+{})", print_node(a), print_node(b)),
        Node::Sub(a, b) => format!("({}-{})", print_node(a), print_node(b)),
        Node::Mul(a, b) => format!("({}*{})", print_node(a), print_node(b)),
        Node::Div(a, b, _) => format!("({}/{})", print_node(a), print_node(b)),
        Node::Pow(a, b) => format!("({}^{})", print_node(a), print_node(b)),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, message: impl Into<String>) -> ExprError {
        ExprError::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut node = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    node = Node::Add(Box::new(node), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    node = Node::Sub(Box::new(node), Box::new(self.term()?));
                }
                _ => return Ok(node),
            }
        }
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut node = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    node = Node::Mul(Box::new(node), Box::new(self.factor()?));
                }
                Some(b'/') => {
                    let offset = self.pos;
                    self.pos += 1;
                    node = Node::Div(Box::new(node), Box::new(self.factor()?), offset);
                }
                _ => return Ok(node),
            }
        }
    }

    fn factor(&mut self) -> Result<Node, ExprError> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            // right associative
            let exponent = self.factor()?;
            Ok(Node::Pow(Box::new(base), Box::new(exponent)))
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Node::Unary(Box::new(self.base()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(c) => Err(self.err(format!("unexpected character `{}`", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Node, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_digit() || c == b'.' {
                self.pos += 1;
            } else if (c == b'e' || c == b'E')
                && self.pos > start
                && self
                    .src
                    .get(self.pos + 1)
                    .is_some_and(|&d| d.is_ascii_digit() || d == b'+' || d == b'-')
            {
                self.pos += 2;
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(Node::Number)
            .map_err(|_| ExprError::Syntax {
                offset: start,
                message: format!("invalid number literal `{text}`"),
            })
    }

    fn identifier(&mut self) -> Result<Node, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match name {
            "u" => Ok(Node::Var('u')),
            "v" => Ok(Node::Var('v')),
            "sin" | "cos" | "exp" | "tanh" | "sqrt" | "log" => {
                let func = match name {
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    "tanh" => Func::Tanh,
                    "sqrt" => Func::Sqrt,
                    _ => Func::Log,
                };
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(Node::Call(func, Box::new(arg)))
            }
            _ => Err(ExprError::UnknownIdentifier {
                name: name.to_string(),
                offset: start,
            }),
        }
    }
}

/// Parse an expression over `u` and `v`.
pub fn parse_expression(src: &str) -> Result<Expression, ExprError> {
    let mut p = Parser::new(src);
    let root = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(ExprError::Syntax {
            offset: p.pos,
            message: "trailing input".to_string(),
        });
    }
    Ok(Expression { root })
}
