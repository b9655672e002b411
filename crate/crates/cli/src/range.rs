//! `--r` syntax: a single value, a comma list, or `start:end[:step]`
//! (inclusive of `end` when the step lands on it). Items may be mixed.

pub fn parse_r_list(s: &str) -> Result<Vec<i64>, String> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(format!("empty item in r list `{s}`"));
        }
        let parts: Vec<&str> = item.split(':').collect();
        let num = |t: &str| t.trim().parse::<i64>().map_err(|_| format!("`{t}` is not an integer in `{item}`"));
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [a, b] | [a, b, _] => {
                let (start, end) = (num(a)?, num(b)?);
                let step = if parts.len() == 3 { num(parts[2])? } else { 1 };
                if step <= 0 {
                    return Err(format!("step must be positive in `{item}`"));
                }
                if start > end {
                    return Err(format!("empty range `{item}`"));
                }
                let mut r = start;
                while r <= end {
                    out.push(r);
                    r += step;
                }
            }
            _ => return Err(format!("malformed range `{item}`")),
        }
    }
    Ok(out)
}
