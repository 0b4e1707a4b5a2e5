use super::Dfao;
use crate::error::{Error, Result};
use crate::exact::{Phase, Scalar};

pub const BUILTIN_NAMES: &[&str] =
    &["thue_morse_even", "thue_morse", "rudin_shapiro", "digit_sum_mod(k,m)", "block_11", "constant_one"];

/// Looks up a standard automaton by name. `digit_sum_mod(k,m)` takes its
/// parameters inline; `thue_morse` is shorthand for `digit_sum_mod(2,2)`.
pub fn builtin(name: &str) -> Result<Dfao> {
    let name = name.trim();
    match name {
        "thue_morse_even" => Dfao::new(2, vec![vec![0, 1], vec![1, 0]], 0, vec![Scalar::one(), Scalar::zero()]),
        "thue_morse" => digit_sum_mod(2, 2),
        "rudin_shapiro" => rudin_shapiro(),
        "block_11" => Dfao::new(
            2,
            vec![vec![0, 1], vec![0, 2], vec![2, 2]],
            0,
            vec![Scalar::zero(), Scalar::zero(), Scalar::one()],
        ),
        "constant_one" => Dfao::new(2, vec![vec![0, 0]], 0, vec![Scalar::one()]),
        _ => {
            if let Some(args) = name.strip_prefix("digit_sum_mod(").and_then(|s| s.strip_suffix(')')) {
                let parts: Vec<&str> = args.split(',').map(str::trim).collect();
                if let [k, m] = parts[..] {
                    let k = k.parse().map_err(|_| Error::UnknownName(name.into()))?;
                    let m = m.parse().map_err(|_| Error::UnknownName(name.into()))?;
                    return digit_sum_mod(k, m);
                }
            }
            Err(Error::UnknownName(name.into()))
        }
    }
}

/// `e(s_k(n)/m)` with `s_k` the base-`k` digit sum.
pub fn digit_sum_mod(k: u32, m: u32) -> Result<Dfao> {
    if m == 0 {
        return Err(Error::Domain("digit_sum_mod needs m >= 1".into()));
    }
    let m_us = m as usize;
    let transitions = (0..m_us).map(|s| (0..k as usize).map(|d| (s + d) % m_us).collect()).collect();
    let outputs = (0..m).map(|s| Scalar::unit(Phase::new(s as i128, m as u64))).collect();
    Dfao::new(k, transitions, 0, outputs)
}

/// `(-1)^{number of occurrences of 11}`; state = 2 * parity + last digit.
fn rudin_shapiro() -> Result<Dfao> {
    let transitions = (0..4usize)
        .map(|s| {
            let (parity, last) = (s >> 1, s & 1);
            (0..2usize).map(|d| 2 * (parity ^ (last & d)) + d).collect()
        })
        .collect();
    let outputs = (0..4).map(|s| if s >> 1 == 0 { Scalar::integer(1) } else { Scalar::integer(-1) }).collect();
    Dfao::new(2, transitions, 0, outputs)
}
