//! Decoding of JSON string escapes.

/// Decoded text for a single-character escape tag (the byte after `\`).
///
/// The grammar only ever feeds `"`; `\`; `/`; `b`; `f`; `n`; `r`; `t`
/// here; anything else is a bug upstream.
pub fn decode_escape(tag: u8) -> &'static str {
    match tag {
        b'"' => "\"",
        b'\\' => "\\",
        b'/' => "/",
        b'b' => "\u{0008}",
        b'f' => "\u{000C}",
        b'n' => "\n",
        b'r' => "\r",
        b't' => "\t",
        other => unreachable!("escape tag {:?} is excluded by the grammar", other as char),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum UnicodeEscapeError {
    #[error("unicode escape digits are not hexadecimal")]
    InvalidHex,
    #[error("unpaired or mismatched surrogate")]
    UnpairedSurrogate,
}

/// Decodes `\uXXXX` (and `\uXXXX\uXXXX` surrogate pairs) into UTF-8 text.
///
/// `second` must be present exactly when `hex4` encodes a high surrogate
/// (D800–DBFF); it must then encode a low surrogate (DC00–DFFF). A pair
/// decodes as `0x10000 + ((hi - 0xD800) << 10) + (lo - 0xDC00)`. Lone or
/// mismatched surrogates are errors.
pub fn decode_unicode_escape(
    hex4: &str,
    second: Option<&str>,
) -> Result<String, UnicodeEscapeError> {
    fn parse4(s: &str) -> Result<u32, UnicodeEscapeError> {
        if s.len() != 4 {
            return Err(UnicodeEscapeError::InvalidHex);
        }
        u32::from_str_radix(s, 16).map_err(|_| UnicodeEscapeError::InvalidHex)
    }

    let hi = parse4(hex4)?;
    match second {
        None => {
            if (0xD800..=0xDFFF).contains(&hi) {
                return Err(UnicodeEscapeError::UnpairedSurrogate);
            }
            Ok(char::from_u32(hi)
                .expect("non-surrogate BMP code point")
                .to_string())
        }
        Some(second) => {
            let lo = parse4(second)?;
            if !(0xD800..=0xDBFF).contains(&hi) || !(0xDC00..=0xDFFF).contains(&lo) {
                return Err(UnicodeEscapeError::UnpairedSurrogate);
            }
            let cp = 0x10000 + ((hi - 0xD800) << 10) + (lo - 0xDC00);
            Ok(char::from_u32(cp)
                .expect("surrogate pair decodes to a valid scalar")
                .to_string())
        }
    }
}
