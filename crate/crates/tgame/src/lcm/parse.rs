use super::{Instruction, Lcm, LcmError, Op};

fn err(line: usize, msg: impl Into<String>) -> LcmError {
    LcmError::Parse { line, msg: msg.into() }
}

/// Parses the line-oriented machine format described in the module docs.
pub fn parse_lcm(src: &str) -> Result<Lcm, LcmError> {
    let mut counters: Option<Vec<String>> = None;
    let mut init: Option<(usize, String)> = None;
    let mut locations: Vec<String> = Vec::new();
    let mut instructions = Vec::new();
    let intern = |locations: &mut Vec<String>, name: &str| match locations.iter().position(|l| l == name) {
        Some(i) => i,
        None => {
            locations.push(name.to_string());
            locations.len() - 1
        }
    };

    for (n, raw) in src.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        match words.next() {
            Some("counters") => {
                if counters.is_some() {
                    return Err(err(line_no, "duplicate counters header"));
                }
                let cs: Vec<String> = words.map(str::to_string).collect();
                if cs.is_empty() {
                    return Err(err(line_no, "counters header lists no counters"));
                }
                for (i, c) in cs.iter().enumerate() {
                    if cs[..i].contains(c) {
                        return Err(err(line_no, format!("duplicate counter {c}")));
                    }
                }
                counters = Some(cs);
            }
            Some("init") => {
                if init.is_some() {
                    return Err(err(line_no, "duplicate init header"));
                }
                let name = words.next().ok_or_else(|| err(line_no, "init needs a location"))?;
                if words.next().is_some() {
                    return Err(err(line_no, "init takes one location"));
                }
                init = Some((line_no, name.to_string()));
            }
            _ => {
                let cs = counters.as_ref().ok_or_else(|| err(line_no, "instruction before counters header"))?;
                if init.is_none() {
                    return Err(err(line_no, "instruction before init header"));
                }
                let (src_loc, rest) = line
                    .split_once(':')
                    .ok_or_else(|| err(line_no, "expected `source: op counter -> target`"))?;
                let (op_part, target) = rest
                    .split_once("->")
                    .ok_or_else(|| err(line_no, "expected `->` before the target"))?;
                let mut op_words = op_part.split_whitespace();
                let op = match op_words.next() {
                    Some("inc") => Op::Inc,
                    Some("dec") => Op::Dec,
                    Some("zt") => Op::Zt,
                    Some(other) => return Err(err(line_no, format!("unknown operation {other:?}"))),
                    None => return Err(err(line_no, "missing operation")),
                };
                let counter_name = op_words.next().ok_or_else(|| err(line_no, "missing counter"))?;
                if op_words.next().is_some() {
                    return Err(err(line_no, "trailing text after counter"));
                }
                let counter = cs
                    .iter()
                    .position(|c| c == counter_name)
                    .ok_or_else(|| err(line_no, format!("undeclared counter {counter_name}")))?;
                let (src_loc, target) = (src_loc.trim(), target.trim());
                if src_loc.is_empty() || target.is_empty() || target.contains(char::is_whitespace) {
                    return Err(err(line_no, "malformed location name"));
                }
                let source = intern(&mut locations, src_loc);
                let target = intern(&mut locations, target);
                instructions.push(Instruction { source, op, counter, target });
            }
        }
    }
    let counters = counters.ok_or_else(|| err(0, "missing counters header"))?;
    let (init_line, init_name) = init.ok_or_else(|| err(0, "missing init header"))?;
    let initial = locations.iter().position(|l| *l == init_name).unwrap_or_else(|| {
        locations.push(init_name.clone());
        locations.len() - 1
    });
    Lcm::new(counters, locations, initial, instructions).map_err(|e| match e {
        LcmError::Parse { msg, .. } => err(init_line, msg),
        other => other,
    })
}
