//! Straight-line programs and their text notation.
//!
//! A program starts from the single value `x_1 = 1`; step `t` combines two
//! already computed positions and appends position `t + 1`. The text form is
//! a comma separated list of `{a,b,op}` tuples, for example
//! `{1,1,+},{1,2,+},{2,3,*}` computes `1, 2, 3, 6`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Add,
    /// Positive difference `|x_a - x_b|`.
    Sub,
    Mul,
}

impl Op {
    pub const ALL: [Op; 3] = [Op::Add, Op::Sub, Op::Mul];

    /// Byte code used by the frontier file format.
    pub fn code(self) -> u8 {
        match self {
            Op::Add => 0,
            Op::Sub => 1,
            Op::Mul => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Op> {
        match code {
            0 => Some(Op::Add),
            1 => Some(Op::Sub),
            2 => Some(Op::Mul),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Op::Add => '+',
            Op::Sub => '-',
            Op::Mul => '*',
        }
    }

    pub fn is_commutative(self) -> bool {
        !matches!(self, Op::Sub)
    }
}

/// One instruction: combine positions `a` and `b` (1-based) with `op`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub a: u32,
    pub b: u32,
    pub op: Op,
}

impl Step {
    /// Builds a step, putting the operands of `+` and `*` in ascending order.
    pub fn new(a: u32, b: u32, op: Op) -> Step {
        if op.is_commutative() && a > b {
            Step { a: b, b: a, op }
        } else {
            Step { a, b, op }
        }
    }

    pub fn is_canonical(&self) -> bool {
        !self.op.is_commutative() || self.a <= self.b
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{},{}}}", self.a, self.b, self.op.symbol())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgramError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("step {step} references position {index}, but only positions 1..={available} exist")]
    InvalidIndex {
        step: usize,
        index: u32,
        available: usize,
    },
}

/// A straight-line program; its length is the number of steps.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Program {
    steps: Vec<Step>,
}

impl Program {
    pub fn empty() -> Program {
        Program { steps: Vec::new() }
    }

    /// Validates indices and canonicalizes commutative operand order.
    pub fn new(steps: impl IntoIterator<Item = Step>) -> Result<Program, ProgramError> {
        let steps: Vec<Step> = steps
            .into_iter()
            .map(|s| Step::new(s.a, s.b, s.op))
            .collect();
        for (t, s) in steps.iter().enumerate() {
            check_index(t, s.a)?;
            check_index(t, s.b)?;
        }
        Ok(Program { steps })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Appends a step; the step must only reference existing positions.
    pub fn push(&mut self, step: Step) -> Result<(), ProgramError> {
        let t = self.steps.len();
        check_index(t, step.a)?;
        check_index(t, step.b)?;
        self.steps.push(Step::new(step.a, step.b, step.op));
        Ok(())
    }

    pub fn with_step(&self, step: Step) -> Result<Program, ProgramError> {
        let mut p = self.clone();
        p.push(step)?;
        Ok(p)
    }

    /// The first `len` steps.
    pub fn prefix(&self, len: usize) -> Program {
        Program {
            steps: self.steps[..len.min(self.steps.len())].to_vec(),
        }
    }

    /// Packed `(a, b, op)` bytes, one triple per step. `None` when an index
    /// does not fit in a byte.
    pub fn encode(&self) -> Option<Vec<u8>> {
        let mut out = Vec::with_capacity(self.steps.len() * 3);
        for s in &self.steps {
            out.push(u8::try_from(s.a).ok()?);
            out.push(u8::try_from(s.b).ok()?);
            out.push(s.op.code());
        }
        Some(out)
    }

    /// Inverse of [`Program::encode`].
    pub fn decode(bytes: &[u8]) -> Result<Program, ProgramError> {
        if !bytes.len().is_multiple_of(3) {
            return Err(ProgramError::Syntax {
                position: bytes.len(),
                message: "packed program length is not a multiple of 3".into(),
            });
        }
        let mut steps = Vec::with_capacity(bytes.len() / 3);
        for (t, chunk) in bytes.chunks_exact(3).enumerate() {
            let op = Op::from_code(chunk[2]).ok_or_else(|| ProgramError::Syntax {
                position: t * 3 + 2,
                message: format!("unknown op code {}", chunk[2]),
            })?;
            steps.push(Step::new(u32::from(chunk[0]), u32::from(chunk[1]), op));
        }
        Program::new(steps)
    }

    pub fn parse(text: &str) -> Result<Program, ProgramError> {
        Parser::new(text).program()
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

fn check_index(step: usize, index: u32) -> Result<(), ProgramError> {
    // Before step `step` (0-based) positions 1..=step+1 exist.
    if index == 0 || index as usize > step + 1 {
        return Err(ProgramError::InvalidIndex {
            step: step + 1,
            index,
            available: step + 1,
        });
    }
    Ok(())
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Program {
    type Err = ProgramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Program::parse(s)
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { text, pos: 0 }
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ProgramError> {
        Err(ProgramError::Syntax {
            position: self.pos,
            message: message.into(),
        })
    }

    fn expect(&mut self, want: char) -> Result<(), ProgramError> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(c) => self.error(format!("expected '{want}', found '{c}'")),
            None => self.error(format!("expected '{want}', found end of input")),
        }
    }

    fn index(&mut self) -> Result<u32, ProgramError> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let digits = rest.len() - rest.trim_start_matches(|c: char| c.is_ascii_digit()).len();
        if digits == 0 {
            return self.error("expected an index");
        }
        let value = rest[..digits].parse::<u32>();
        match value {
            Ok(v) if v >= 1 => {
                self.pos += digits;
                Ok(v)
            }
            Ok(_) => self.error("indices start at 1"),
            Err(_) => self.error("index out of range"),
        }
    }

    fn op(&mut self) -> Result<Op, ProgramError> {
        let op = match self.peek() {
            Some('+') => Op::Add,
            Some('-') => Op::Sub,
            Some('*') => Op::Mul,
            Some(c) => return self.error(format!("expected one of '+', '-', '*', found '{c}'")),
            None => return self.error("expected an operator, found end of input"),
        };
        self.pos += 1;
        Ok(op)
    }

    fn program(mut self) -> Result<Program, ProgramError> {
        let mut program = Program::empty();
        if self.peek().is_none() {
            return Ok(program);
        }
        loop {
            self.expect('{')?;
            let a = self.index()?;
            self.expect(',')?;
            let b = self.index()?;
            self.expect(',')?;
            let op = self.op()?;
            self.expect('}')?;
            program.push(Step { a, b, op })?;
            match self.peek() {
                None => return Ok(program),
                Some(',') => self.pos += 1,
                Some(c) => return self.error(format!("expected ',' or end of input, found '{c}'")),
            }
        }
    }
}
