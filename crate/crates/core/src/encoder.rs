//! Generator matrices over GF(2)[D] rational functions and their
//! finite-state realizations in controller or observer canonical form.
//!
//! Conventions (fixed so state indices and golden files are stable):
//! - Octal shorthand is MSB-first: octal `5` = binary `101` = `1 + D^2`,
//!   octal `7` = `111` = `1 + D + D^2`, so `"5,7"` is the 4-state rate-1/2
//!   code. Multi-digit strings are read the same way: `37` = `11111` =
//!   `1 + D + D^2 + D^3 + D^4`.
//! - Controller form: each input row gets a feedback shift register; cells
//!   are numbered row-major with the leftmost (most recent) cell as the
//!   least significant state bit.
//! - Observer form: each parity output gets a delay chain; the cell nearest
//!   the output is the least significant state bit.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncoderError {
    #[error("generator syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("non-realizable denominator (zero constant term): {0}")]
    NonRealizable(String),
    #[error("generator matrix must have fewer inputs than outputs (b={b}, c={c})")]
    BadShape { b: usize, c: usize },
    #[error("observer form requires a systematic (I_b | parity) matrix")]
    ObserverShape,
    #[error("encoder state graph is not strongly connected")]
    NotStronglyConnected,
    #[error("realization has {actual} states but {expected} were declared; pass --allow-nonminimal to analyze a nonminimal encoder")]
    Nonminimal { actual: usize, expected: usize },
}

/// Binary polynomial in D as a bitmask; bit k is the coefficient of `D^k`.
pub type Gf2Poly = u64;

pub fn gf2_degree(p: Gf2Poly) -> usize {
    63 - p.leading_zeros() as usize
}

pub fn gf2_mul(a: Gf2Poly, b: Gf2Poly) -> Gf2Poly {
    let mut out = 0;
    let mut a = a;
    let mut shift = 0;
    while a != 0 {
        if a & 1 == 1 {
            out ^= b << shift;
        }
        a >>= 1;
        shift += 1;
    }
    out
}

pub fn gf2_divrem(a: Gf2Poly, d: Gf2Poly) -> (Gf2Poly, Gf2Poly) {
    assert!(d != 0);
    let dd = gf2_degree(d);
    let mut rem = a;
    let mut quot = 0;
    while rem != 0 && gf2_degree(rem) >= dd {
        let shift = gf2_degree(rem) - dd;
        rem ^= d << shift;
        quot |= 1 << shift;
    }
    (quot, rem)
}

pub fn gf2_gcd(mut a: Gf2Poly, mut b: Gf2Poly) -> Gf2Poly {
    while b != 0 {
        let (_, r) = gf2_divrem(a, b);
        a = b;
        b = r;
    }
    a
}

pub fn gf2_lcm(a: Gf2Poly, b: Gf2Poly) -> Gf2Poly {
    if a == 0 || b == 0 {
        return 0;
    }
    gf2_divrem(gf2_mul(a, b), gf2_gcd(a, b)).0
}

/// Rational function over GF(2)[D]; the denominator constant term must be 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gf2Rat {
    pub num: Gf2Poly,
    pub den: Gf2Poly,
}

impl Gf2Rat {
    pub fn poly(num: Gf2Poly) -> Self {
        Gf2Rat { num, den: 1 }
    }
    pub fn is_zero(&self) -> bool {
        self.num == 0
    }
}

/// A b-by-c generator matrix of binary rational functions in D.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenMatrix {
    pub b: usize,
    pub c: usize,
    pub entries: Vec<Vec<Gf2Rat>>,
}

impl GenMatrix {
    pub fn rate(&self) -> (usize, usize) {
        (self.b, self.c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Form {
    Controller,
    Observer,
}

impl std::str::FromStr for Form {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "controller" => Ok(Form::Controller),
            "observer" => Ok(Form::Observer),
            other => Err(format!("unknown form '{other}' (controller|observer)")),
        }
    }
}

/// Finite-state encoder with explicit transition table.
#[derive(Clone, Debug)]
pub struct EncoderFsm {
    pub b: usize,
    pub c: usize,
    /// Overall constraint length (total delay cells).
    pub nu: usize,
    /// Largest single-register memory.
    pub memory: usize,
    pub num_states: usize,
    pub form: Form,
    /// `transitions[state * 2^b + input] = (next_state, output_bits)`.
    /// Output bit j of the c-tuple is `(output >> j) & 1`.
    pub transitions: Vec<(u32, u32)>,
}

impl EncoderFsm {
    pub fn step(&self, state: u32, input: u32) -> (u32, u32) {
        self.transitions[(state as usize) << self.b | input as usize]
    }

    pub fn num_inputs(&self) -> usize {
        1 << self.b
    }

    /// BFS reachability from every state.
    pub fn is_strongly_connected(&self) -> bool {
        let n = self.num_states;
        for start in 0..n {
            let mut seen = vec![false; n];
            let mut queue = std::collections::VecDeque::from([start]);
            seen[start] = true;
            let mut count = 1;
            while let Some(s) = queue.pop_front() {
                for u in 0..self.num_inputs() {
                    let (t, _) = self.step(s as u32, u as u32);
                    if !seen[t as usize] {
                        seen[t as usize] = true;
                        count += 1;
                        queue.push_back(t as usize);
                    }
                }
            }
            if count != n {
                return false;
            }
        }
        true
    }
}

/// One trellis branch with its information weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct BranchLabel {
    pub from: u32,
    pub to: u32,
    /// c output bits; bit j is output position j.
    pub output: u32,
    /// Number of information 1s on the branch.
    pub beta: u8,
}

/// Trellis section with branches grouped by destination state.
#[derive(Clone, Debug)]
pub struct Trellis {
    pub num_states: usize,
    pub b: usize,
    pub c: usize,
    pub branches: Vec<BranchLabel>,
    /// `incoming[to]` lists branches entering state `to`.
    pub incoming: Vec<Vec<BranchLabel>>,
}

pub fn trellis(fsm: &EncoderFsm) -> Trellis {
    let mut branches = Vec::with_capacity(fsm.num_states << fsm.b);
    let mut incoming = vec![Vec::new(); fsm.num_states];
    for state in 0..fsm.num_states as u32 {
        for input in 0..(1u32 << fsm.b) {
            let (to, output) = fsm.step(state, input);
            let label = BranchLabel {
                from: state,
                to,
                output,
                beta: input.count_ones() as u8,
            };
            branches.push(label);
            incoming[to as usize].push(label);
        }
    }
    Trellis {
        num_states: fsm.num_states,
        b: fsm.b,
        c: fsm.c,
        branches,
        incoming,
    }
}

// ---------------------------------------------------------------------------
// Parsing

/// Parses either octal shorthand (`"5,7"`, rate 1/c) or the bracketed matrix
/// syntax (`"[[1,0,1+D],[0,1,1+D]]"` with entries like `(1+D^2)/(1+D+D^2)`).
pub fn parse_generator(text: &str) -> Result<GenMatrix, EncoderError> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        parse_bracketed(trimmed)
    } else {
        parse_octal(trimmed)
    }
}

fn parse_octal(text: &str) -> Result<GenMatrix, EncoderError> {
    let mut row = Vec::new();
    for (i, part) in text.split(',').enumerate() {
        let part = part.trim();
        if part.is_empty() || !part.chars().all(|c| ('0'..='7').contains(&c)) {
            return Err(EncoderError::Syntax {
                pos: i,
                msg: format!("'{part}' is not an octal digit string"),
            });
        }
        let value = u64::from_str_radix(part, 8).map_err(|e| EncoderError::Syntax {
            pos: i,
            msg: e.to_string(),
        })?;
        if value == 0 {
            return Err(EncoderError::Syntax {
                pos: i,
                msg: "zero generator polynomial".into(),
            });
        }
        // MSB-first: the leading binary digit is the D^0 coefficient.
        let bits = 64 - value.leading_zeros();
        let mut poly: Gf2Poly = 0;
        for k in 0..bits {
            if (value >> (bits - 1 - k)) & 1 == 1 {
                poly |= 1 << k;
            }
        }
        row.push(Gf2Rat::poly(poly));
    }
    if row.len() < 2 {
        return Err(EncoderError::BadShape { b: 1, c: row.len() });
    }
    Ok(GenMatrix {
        b: 1,
        c: row.len(),
        entries: vec![row],
    })
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    _text: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            chars: text.chars().collect(),
            pos: 0,
            _text: text,
        }
    }
    fn skip_ws(&mut self) {
        while self.peek().map_or(false, |c| c.is_whitespace()) {
            self.pos += 1;
        }
    }
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }
    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }
    fn expect(&mut self, c: char) -> Result<(), EncoderError> {
        self.skip_ws();
        if self.bump() == Some(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }
    fn err(&self, msg: &str) -> EncoderError {
        EncoderError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }
}

fn parse_bracketed(text: &str) -> Result<GenMatrix, EncoderError> {
    let mut cur = Cursor::new(text);
    cur.expect('[')?;
    let mut rows: Vec<Vec<Gf2Rat>> = Vec::new();
    loop {
        cur.skip_ws();
        cur.expect('[')?;
        let mut row = Vec::new();
        loop {
            let entry = parse_entry(&mut cur)?;
            row.push(entry);
            cur.skip_ws();
            match cur.bump() {
                Some(',') => continue,
                Some(']') => break,
                _ => return Err(cur.err("expected ',' or ']'")),
            }
        }
        rows.push(row);
        cur.skip_ws();
        match cur.bump() {
            Some(',') => continue,
            Some(']') => break,
            _ => return Err(cur.err("expected ',' or ']'")),
        }
    }
    cur.skip_ws();
    if cur.peek().is_some() {
        return Err(cur.err("trailing input after matrix"));
    }
    let b = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != c) {
        return Err(EncoderError::Syntax {
            pos: 0,
            msg: "ragged rows".into(),
        });
    }
    if b >= c {
        return Err(EncoderError::BadShape { b, c });
    }
    Ok(GenMatrix { b, c, entries: rows })
}

fn parse_entry(cur: &mut Cursor) -> Result<Gf2Rat, EncoderError> {
    cur.skip_ws();
    let num = if cur.peek() == Some('(') {
        cur.bump();
        let p = parse_poly(cur)?;
        cur.expect(')')?;
        p
    } else {
        parse_poly(cur)?
    };
    cur.skip_ws();
    if cur.peek() == Some('/') {
        cur.bump();
        cur.skip_ws();
        let den = if cur.peek() == Some('(') {
            cur.bump();
            let p = parse_poly(cur)?;
            cur.expect(')')?;
            p
        } else {
            parse_poly(cur)?
        };
        if den & 1 == 0 {
            return Err(EncoderError::NonRealizable(format!(
                "denominator with mask {den:#b}"
            )));
        }
        Ok(Gf2Rat { num, den })
    } else {
        Ok(Gf2Rat::poly(num))
    }
}

/// Parses `1 + D + D^2` style sums of monomials over GF(2).
fn parse_poly(cur: &mut Cursor) -> Result<Gf2Poly, EncoderError> {
    let mut poly: Gf2Poly = 0;
    loop {
        cur.skip_ws();
        match cur.peek() {
            Some('0') => {
                cur.bump();
            }
            Some('1') => {
                cur.bump();
                poly ^= 1;
            }
            Some('D') | Some('d') => {
                cur.bump();
                let power = if cur.peek() == Some('^') {
                    cur.bump();
                    let mut digits = String::new();
                    while cur.peek().map_or(false, |c| c.is_ascii_digit()) {
                        digits.push(cur.bump().unwrap());
                    }
                    digits
                        .parse::<u32>()
                        .map_err(|_| cur.err("expected exponent after '^'"))?
                } else {
                    1
                };
                if power > 62 {
                    return Err(cur.err("exponent too large"));
                }
                poly ^= 1 << power;
            }
            _ => return Err(cur.err("expected '0', '1', or 'D' term")),
        }
        cur.skip_ws();
        if cur.peek() == Some('+') {
            cur.bump();
        } else {
            return Ok(poly);
        }
    }
}

// ---------------------------------------------------------------------------
// Realizations

/// Realizes a generator matrix as a finite-state encoder.
pub fn realize(g: &GenMatrix, form: Form) -> Result<EncoderFsm, EncoderError> {
    let fsm = match form {
        Form::Controller => realize_controller(g)?,
        Form::Observer => realize_observer(g)?,
    };
    if !fsm.is_strongly_connected() {
        return Err(EncoderError::NotStronglyConnected);
    }
    Ok(fsm)
}

/// One feedback shift register per input row; all registers share the input
/// step and their output contributions are XORed per output position.
fn realize_controller(g: &GenMatrix) -> Result<EncoderFsm, EncoderError> {
    struct Row {
        den: Gf2Poly,
        nums: Vec<Gf2Poly>,
        memory: usize,
    }
    let mut rows = Vec::with_capacity(g.b);
    for row in &g.entries {
        let mut den: Gf2Poly = 1;
        for e in row {
            if e.den & 1 == 0 {
                return Err(EncoderError::NonRealizable(format!("{e:?}")));
            }
            den = gf2_lcm(den, e.den);
        }
        let nums: Vec<Gf2Poly> = row
            .iter()
            .map(|e| gf2_mul(e.num, gf2_divrem(den, e.den).0))
            .collect();
        let memory = nums
            .iter()
            .map(|&n| if n == 0 { 0 } else { gf2_degree(n) })
            .chain(std::iter::once(gf2_degree(den)))
            .max()
            .unwrap_or(0);
        rows.push(Row { den, nums, memory });
    }
    let nu: usize = rows.iter().map(|r| r.memory).sum();
    let num_states = 1usize << nu;
    let memory = rows.iter().map(|r| r.memory).max().unwrap_or(0);

    let mut transitions = vec![(0u32, 0u32); num_states << g.b];
    for state in 0..num_states as u32 {
        for input in 0..(1u32 << g.b) {
            let mut next = 0u32;
            let mut output = 0u32;
            let mut offset = 0;
            for (i, row) in rows.iter().enumerate() {
                let m = row.memory;
                // cells[k] = w_{t-1-k}; leftmost (k = 0) is the LSB.
                let cells = (state >> offset) & ((1u32 << m) - 1);
                let u = (input >> i) & 1;
                let mut w = u;
                for k in 1..=m {
                    if (row.den >> k) & 1 == 1 {
                        w ^= (cells >> (k - 1)) & 1;
                    }
                }
                for (j, &numer) in row.nums.iter().enumerate() {
                    let mut v = (numer & 1) as u32 * w;
                    for k in 1..=m {
                        if (numer >> k) & 1 == 1 {
                            v ^= (cells >> (k - 1)) & 1;
                        }
                    }
                    output ^= (v & 1) << j;
                }
                let new_cells = if m == 0 {
                    0
                } else {
                    ((cells << 1) | w) & ((1u32 << m) - 1)
                };
                next |= new_cells << offset;
                offset += m;
            }
            transitions[(state as usize) << g.b | input as usize] = (next, output);
        }
    }
    Ok(EncoderFsm {
        b: g.b,
        c: g.c,
        nu,
        memory,
        num_states,
        form: Form::Controller,
        transitions,
    })
}

/// Observer canonical form for systematic `(I_b | parity)` matrices: one
/// delay chain per parity column with output-side feedback.
fn realize_observer(g: &GenMatrix) -> Result<EncoderFsm, EncoderError> {
    // Shape check: leading b columns must be the identity.
    for (i, row) in g.entries.iter().enumerate() {
        for (j, e) in row.iter().take(g.b).enumerate() {
            let want = if i == j { Gf2Rat::poly(1) } else { Gf2Rat::poly(0) };
            if *e != want {
                return Err(EncoderError::ObserverShape);
            }
        }
    }
    struct Col {
        den: Gf2Poly,
        nums: Vec<Gf2Poly>, // adjusted numerator per input
        nu: usize,
    }
    let mut cols = Vec::new();
    for j in g.b..g.c {
        let mut den: Gf2Poly = 1;
        for row in &g.entries {
            let e = row[j];
            if e.den & 1 == 0 {
                return Err(EncoderError::NonRealizable(format!("{e:?}")));
            }
            den = gf2_lcm(den, e.den);
        }
        let nums: Vec<Gf2Poly> = g
            .entries
            .iter()
            .map(|row| gf2_mul(row[j].num, gf2_divrem(den, row[j].den).0))
            .collect();
        let nu = nums
            .iter()
            .map(|&n| if n == 0 { 0 } else { gf2_degree(n) })
            .chain(std::iter::once(gf2_degree(den)))
            .max()
            .unwrap_or(0);
        cols.push(Col { den, nums, nu });
    }
    let nu: usize = cols.iter().map(|c| c.nu).sum();
    let num_states = 1usize << nu;
    let memory = cols.iter().map(|c| c.nu).max().unwrap_or(0);

    let mut transitions = vec![(0u32, 0u32); num_states << g.b];
    for state in 0..num_states as u32 {
        for input in 0..(1u32 << g.b) {
            let mut output = input; // systematic positions 0..b
            let mut next = 0u32;
            let mut offset = 0;
            for (cj, col) in cols.iter().enumerate() {
                let m = col.nu;
                let cells = (state >> offset) & ((1u32 << m) - 1);
                // y = sum_i n_{i,0} u_i + s_1  (s_1 is the LSB cell)
                let mut y = cells & 1;
                if m == 0 {
                    y = 0;
                }
                for (i, &numer) in col.nums.iter().enumerate() {
                    y ^= (numer & 1) as u32 * ((input >> i) & 1);
                }
                // s_k' = sum_i n_{i,k} u_i + d_k y + s_{k+1}
                let mut new_cells = 0u32;
                for k in 1..=m {
                    let mut s = if k < m { (cells >> k) & 1 } else { 0 };
                    for (i, &numer) in col.nums.iter().enumerate() {
                        if (numer >> k) & 1 == 1 {
                            s ^= (input >> i) & 1;
                        }
                    }
                    if (col.den >> k) & 1 == 1 {
                        s ^= y;
                    }
                    new_cells |= s << (k - 1);
                }
                output |= (y & 1) << (g.b + cj);
                next |= new_cells << offset;
                offset += m;
            }
            transitions[(state as usize) << g.b | input as usize] = (next, output);
        }
    }
    Ok(EncoderFsm {
        b: g.b,
        c: g.c,
        nu,
        memory,
        num_states,
        form: Form::Observer,
        transitions,
    })
}

/// Compares the realized state count against a user-declared expectation.
/// Without a declaration no check is possible and the result is `Ok`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimalityCheck {
    Ok,
    Warning { actual: usize, expected: usize },
}

pub fn check_minimal_usable(fsm: &EncoderFsm, expect_states: Option<usize>) -> MinimalityCheck {
    match expect_states {
        Some(expected) if fsm.num_states > expected => MinimalityCheck::Warning {
            actual: fsm.num_states,
            expected,
        },
        _ => MinimalityCheck::Ok,
    }
}

/// JSON debug dump of an FSM.
pub fn fsm_json(fsm: &EncoderFsm) -> serde_json::Value {
    let transitions: Vec<serde_json::Value> = (0..fsm.num_states as u32)
        .flat_map(|s| {
            (0..(1u32 << fsm.b)).map(move |u| (s, u))
        })
        .map(|(s, u)| {
            let (to, out) = fsm.step(s, u);
            serde_json::json!({
                "from": s,
                "input": u,
                "to": to,
                "output": (0..fsm.c).map(|j| (out >> j) & 1).collect::<Vec<u32>>(),
            })
        })
        .collect();
    serde_json::json!({
        "states": fsm.num_states,
        "inputs": fsm.b,
        "outputs": fsm.c,
        "nu": fsm.nu,
        "form": fsm.form,
        "transitions": transitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq4_matrix() -> GenMatrix {
        parse_generator("[[1,0,1+D],[0,1,1+D]]").unwrap()
    }

    #[test]
    fn octal_msb_first() {
        let g = parse_generator("5,7").unwrap();
        assert_eq!(g.rate(), (1, 2));
        assert_eq!(g.entries[0][0], Gf2Rat::poly(0b101)); // 1 + D^2
        assert_eq!(g.entries[0][1], Gf2Rat::poly(0b111)); // 1 + D + D^2
    }

    #[test]
    fn octal_memory_one() {
        let g = parse_generator("1,3").unwrap();
        assert_eq!(g.entries[0][0], Gf2Rat::poly(0b1));
        assert_eq!(g.entries[0][1], Gf2Rat::poly(0b11)); // 1 + D
    }

    #[test]
    fn bracketed_systematic_recursive() {
        let g = parse_generator("[[1,(1+D^2)/(1+D+D^2)]]").unwrap();
        assert_eq!(g.rate(), (1, 2));
        assert_eq!(g.entries[0][1].num, 0b101);
        assert_eq!(g.entries[0][1].den, 0b111);
    }

    #[test]
    fn bracketed_rate_two_thirds() {
        let g = eq4_matrix();
        assert_eq!(g.rate(), (2, 3));
        assert_eq!(g.entries[0][2], Gf2Rat::poly(0b11));
        assert_eq!(g.entries[1][0], Gf2Rat::poly(0));
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_generator("[[1,2+D]]").unwrap_err();
        match err {
            EncoderError::Syntax { msg, .. } => assert!(msg.contains("expected")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn nonrealizable_denominator_rejected() {
        let err = parse_generator("[[1,(1+D)/(D)]]").unwrap_err();
        assert!(matches!(err, EncoderError::NonRealizable(_)));
    }

    #[test]
    fn controller_memory_one_transitions() {
        // G = (1, 1+D): 2 states, hand-simulated single delay cell.
        let g = parse_generator("1,3").unwrap();
        let fsm = realize(&g, Form::Controller).unwrap();
        assert_eq!(fsm.num_states, 2);
        // output bit 0 = first generator (u), bit 1 = second (u + state)
        assert_eq!(fsm.step(0, 0), (0, 0b00));
        assert_eq!(fsm.step(0, 1), (1, 0b11));
        assert_eq!(fsm.step(1, 0), (0, 0b10)); // v = (0, 1)
        assert_eq!(fsm.step(1, 1), (1, 0b01)); // v = (1, 0)
    }

    #[test]
    fn observer_form_of_systematic_rate_two_thirds() {
        // 2-state realization: sigma' = u1 + u2, v3 = u1 + u2 + sigma.
        let fsm = realize(&eq4_matrix(), Form::Observer).unwrap();
        assert_eq!(fsm.num_states, 2);
        for state in 0..2u32 {
            for input in 0..4u32 {
                let u1 = input & 1;
                let u2 = (input >> 1) & 1;
                let (next, out) = fsm.step(state, input);
                assert_eq!(next, u1 ^ u2);
                assert_eq!(out & 1, u1);
                assert_eq!((out >> 1) & 1, u2);
                assert_eq!((out >> 2) & 1, u1 ^ u2 ^ state);
            }
        }
    }

    #[test]
    fn controller_form_of_eq4_is_four_state() {
        let fsm = realize(&eq4_matrix(), Form::Controller).unwrap();
        assert_eq!(fsm.num_states, 4);
        assert_eq!(
            check_minimal_usable(&fsm, Some(2)),
            MinimalityCheck::Warning {
                actual: 4,
                expected: 2
            }
        );
        assert_eq!(check_minimal_usable(&fsm, None), MinimalityCheck::Ok);
    }

    #[test]
    fn trellis_branch_counts() {
        let two_state = realize(&parse_generator("1,3").unwrap(), Form::Controller).unwrap();
        assert_eq!(trellis(&two_state).branches.len(), 4);

        let r23 = realize(&eq4_matrix(), Form::Observer).unwrap();
        assert_eq!(trellis(&r23).branches.len(), 8);

        let m4 = realize(&parse_generator("[[1+D^2+D^3+D^4,1+D+D^4]]").unwrap(), Form::Controller)
            .unwrap();
        assert_eq!(m4.num_states, 16);
        assert_eq!(trellis(&m4).branches.len(), 32);
    }

    #[test]
    fn zero_input_fixed_point_and_linearity() {
        let fsm = realize(&parse_generator("5,7").unwrap(), Form::Controller).unwrap();
        assert_eq!(fsm.step(0, 0), (0, 0));
        // Linearity over a handful of fixed sequences.
        let encode = |bits: &[u32]| -> Vec<u32> {
            let mut state = 0u32;
            let mut out = Vec::new();
            for &u in bits {
                let (next, v) = fsm.step(state, u);
                state = next;
                out.push(v);
            }
            out
        };
        let a = [1, 0, 1, 1, 0, 0, 1];
        let b = [0, 1, 1, 0, 1, 0, 1];
        let xor: Vec<u32> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let ea = encode(&a);
        let eb = encode(&b);
        let exor = encode(&xor);
        for i in 0..a.len() {
            assert_eq!(ea[i] ^ eb[i], exor[i]);
        }
    }

    #[test]
    fn realizations_are_strongly_connected() {
        for gen in ["1,3", "5,7", "[[D,1+D,1+D],[1,D,1+D]]"] {
            let g = parse_generator(gen).unwrap();
            let fsm = realize(&g, Form::Controller).unwrap();
            assert!(fsm.is_strongly_connected());
        }
    }
}
