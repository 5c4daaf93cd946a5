use std::io::Read;
use std::path::Path;

use jbt::Symbol;

/// Reads a file, or stdin for `-` or no path.
pub fn read_all(path: Option<&Path>) -> Result<Vec<u8>, String> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::read(p).map_err(|e| format!("{}: {e}", p.display())),
        _ => {
            let mut buf = Vec::new();
            std::io::stdin().read_to_end(&mut buf).map_err(|e| format!("stdin: {e}"))?;
            Ok(buf)
        }
    }
}

/// Raw bytes, or whitespace-separated unsigned integer tokens.
pub fn symbols(data: &[u8], tokens: bool) -> Result<Vec<Symbol>, String> {
    if !tokens {
        return Ok(data.iter().map(|&b| b as Symbol).collect());
    }
    let text = std::str::from_utf8(data).map_err(|_| "token input is not UTF-8".to_string())?;
    text.split_whitespace()
        .map(|w| {
            let x: u64 = w.parse().map_err(|_| format!("bad token {w:?}"))?;
            Symbol::try_from(x).map_err(|_| format!("token {x} outside the letter namespace"))
        })
        .collect()
}
