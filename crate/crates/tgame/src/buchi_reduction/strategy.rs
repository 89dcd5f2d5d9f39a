use super::{local_status, Lcm, ERR_A, ERR_B, ERR_C, ERR_REG, OK};
use crate::exact_time::Rat;
use crate::game::{GameError, MonitorStrategy};

/// Monitor that answers `✓` until some local check breaks, then names the
/// broken check (Reg before A before B before C) for the rest of the play.
#[derive(Debug, Clone)]
pub struct MonitorOracle<'a> {
    m: &'a Lcm,
    checked: usize,
    verdict: Option<&'static str>,
}

impl<'a> MonitorOracle<'a> {
    pub fn new(m: &'a Lcm) -> Self {
        MonitorOracle { m, checked: 0, verdict: None }
    }

    /// Verdict for a prefix whose proper prefixes all passed.
    pub fn verdict_for(m: &Lcm, w: &[(String, Rat)]) -> Result<&'static str, GameError> {
        let s = local_status(m, w).map_err(|e| GameError::Setup(e.to_string()))?;
        Ok(if !s.reg {
            ERR_REG
        } else if !s.a {
            ERR_A
        } else if !s.b {
            ERR_B
        } else if s.c == Some(false) {
            ERR_C
        } else {
            OK
        })
    }
}

impl MonitorStrategy for MonitorOracle<'_> {
    fn answer(&mut self, h: &[(String, Rat)]) -> Result<String, GameError> {
        if h.len() <= self.checked {
            // a replay from an earlier point
            *self = MonitorOracle::new(self.m);
        }
        while self.verdict.is_none() && self.checked < h.len() {
            self.checked += 1;
            let v = Self::verdict_for(self.m, &h[..self.checked])?;
            if v != OK {
                self.verdict = Some(v);
            }
        }
        Ok(self.verdict.unwrap_or(OK).to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_time::r;
    use crate::lcm::fixtures;

    fn answers(m: &Lcm, w: &[(&str, &str)]) -> Vec<String> {
        let w: Vec<(String, Rat)> = w.iter().map(|(l, t)| (l.to_string(), r(t))).collect();
        let mut o = MonitorOracle::new(m);
        (1..=w.len()).map(|n| o.answer(&w[..n]).unwrap()).collect()
    }

    #[test]
    fn duplicate_timestamp_is_an_a_error() {
        let m = fixtures::m1();
        assert_eq!(answers(&m, &[("c1", "1/2"), ("c1", "1/2")]), ["✗C", "✗C"]);
        let w = [("s0:inc c1->s1", "1"), ("c1", "3/2"), ("c1", "3/2")];
        assert_eq!(answers(&m, &w), ["✓", "✓", "✗A"]);
    }

    #[test]
    fn block_zero_token_is_a_c_error() {
        let m = fixtures::m1();
        assert_eq!(answers(&m, &[("c1", "1/3")]), ["✗C"]);
    }

    #[test]
    fn reg_outranks_the_rest() {
        let m = fixtures::m1();
        assert_eq!(answers(&m, &[("s1:dec c1->s0", "1/2")]), ["✗R"]);
    }
}
