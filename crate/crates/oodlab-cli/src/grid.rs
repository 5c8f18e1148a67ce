//! Parsing of OOD-count grids.
//!
//! Two syntaxes: `start:stop:step` (inclusive of `stop` when aligned) and a
//! comma-separated explicit list `0,28,100`.

pub fn parse_m_grid(text: &str) -> Result<Vec<usize>, String> {
    let grid = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("m grid `{text}` must be start:stop:step"));
        }
        let start: usize = parts[0]
            .parse()
            .map_err(|_| format!("invalid grid start `{}`", parts[0]))?;
        let stop: usize = parts[1]
            .parse()
            .map_err(|_| format!("invalid grid stop `{}`", parts[1]))?;
        let step: usize = parts[2]
            .parse()
            .map_err(|_| format!("invalid grid step `{}`", parts[2]))?;
        if step == 0 {
            return Err(format!("m grid `{text}` has zero step"));
        }
        if start > stop {
            return Err(format!("m grid `{text}` has start > stop"));
        }
        (start..=stop).step_by(step).collect()
    } else {
        text.split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("invalid m value `{tok}`"))
            })
            .collect::<Result<Vec<usize>, String>>()?
    };
    if grid.is_empty() {
        return Err(format!("m grid `{text}` is empty"));
    }
    for i in 1..grid.len() {
        if grid[i] <= grid[i - 1] {
            return Err(format!("m grid `{text}` must be strictly ascending"));
        }
    }
    Ok(grid)
}

/// Canonical text form for explicit `--m` lists, recorded in sidecars.
pub fn explicit_grid_text(values: &[usize]) -> String {
    values
        .iter()
        .map(|m| m.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
