//! LIKE and GLOB pattern matching, ported from the engine's backtracking
//! matcher including its UTF-8 reader (invalid sequences decode the same
//! way) and its NUL-terminator behavior.

/// Read one "character" starting at `i`, engine style: bytes 0x80..0xBF
/// stand alone, 0xC0+ consume following continuation bytes, and overlong
/// or surrogate results collapse to 0xFFFD. Returns (codepoint, next index).
/// A 0x00 byte (or end of slice) reads as 0.
fn utf8_read(z: &[u8], i: usize) -> (u32, usize) {
    if i >= z.len() || z[i] == 0 {
        return (0, i);
    }
    let mut c = z[i] as u32;
    let mut j = i + 1;
    if c >= 0xc0 {
        c = UTF8_TRANS1[(c - 0xc0) as usize] as u32;
        while j < z.len() && (z[j] & 0xc0) == 0x80 {
            c = (c << 6) + (0x3f & z[j]) as u32;
            j += 1;
        }
        if c < 0x80 || (c & 0xFFFFF800) == 0xD800 || (c & 0xFFFFFFFE) == 0xFFFE {
            c = 0xFFFD;
        }
    }
    (c, j)
}

#[rustfmt::skip]
static UTF8_TRANS1: [u8; 64] = [
    0x00, 0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07,
    0x08, 0x09, 0x0a, 0x0b, 0x0c, 0x0d, 0x0e, 0x0f,
    0x10, 0x11, 0x12, 0x13, 0x14, 0x15, 0x16, 0x17,
    0x18, 0x19, 0x1a, 0x1b, 0x1c, 0x1d, 0x1e, 0x1f,
    0x00, 0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07,
    0x08, 0x09, 0x0a, 0x0b, 0x0c, 0x0d, 0x0e, 0x0f,
    0x00, 0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07,
    0x00, 0x01, 0x02, 0x03, 0x00, 0x01, 0x02, 0x03,
];

fn to_lower(c: u32) -> u32 {
    if c < 0x80 {
        (c as u8).to_ascii_lowercase() as u32
    } else {
        c
    }
}

#[derive(Clone, Copy)]
pub struct CompareInfo {
    pub match_all: u32,
    pub match_one: u32,
    pub match_set: u32,
    pub no_case: bool,
}

pub const LIKE_INFO: CompareInfo = CompareInfo {
    match_all: b'%' as u32,
    match_one: b'_' as u32,
    match_set: 0,
    no_case: true,
};

pub const LIKE_INFO_CASE: CompareInfo = CompareInfo {
    no_case: false,
    ..LIKE_INFO
};

pub const GLOB_INFO: CompareInfo = CompareInfo {
    match_all: b'*' as u32,
    match_one: b'?' as u32,
    match_set: b'[' as u32,
    no_case: false,
};

const MATCH: i32 = 0;
const NOMATCH: i32 = 1;
const NOWILDCARDMATCH: i32 = 2;

/// True when `string` matches `pattern`. `match_other` is the escape
/// character for LIKE (0 when absent) or '[' for GLOB.
pub fn pattern_match(pattern: &[u8], string: &[u8], info: &CompareInfo, match_other: u32) -> bool {
    pattern_compare(pattern, 0, string, 0, info, match_other) == MATCH
}

fn pattern_compare(
    zp: &[u8],
    mut p: usize,
    zs: &[u8],
    mut s: usize,
    info: &CompareInfo,
    match_other: u32,
) -> i32 {
    let match_one = info.match_one;
    let match_all = info.match_all;
    let no_case = info.no_case;
    // One past the last escaped pattern position.
    let mut escaped: Option<usize> = None;

    loop {
        let (mut c, mut pn) = utf8_read(zp, p);
        if c == 0 {
            break;
        }
        p = pn;
        if c == match_all {
            // Collapse consecutive '%' and '_' wildcards.
            loop {
                let (c2, pn2) = utf8_read(zp, p);
                if c2 == match_all || (c2 == match_one && match_one != 0) {
                    p = pn2;
                    if c2 == match_one {
                        let (cs, sn) = utf8_read(zs, s);
                        if cs == 0 {
                            return NOWILDCARDMATCH;
                        }
                        s = sn;
                    }
                } else {
                    c = c2;
                    pn = pn2;
                    break;
                }
            }
            if c == 0 {
                return MATCH;
            } else if c == match_other {
                if info.match_set == 0 {
                    let (ce, pe) = utf8_read(zp, pn);
                    if ce == 0 {
                        return NOWILDCARDMATCH;
                    }
                    c = ce;
                    p = pe;
                } else {
                    // "[...]" directly after the wildcard: recursive scan.
                    loop {
                        if s >= zs.len() || zs[s] == 0 {
                            return NOWILDCARDMATCH;
                        }
                        let b = pattern_compare(zp, pn - 1, zs, s, info, match_other);
                        if b != NOMATCH {
                            return b;
                        }
                        s = skip_utf8(zs, s);
                    }
                }
            } else {
                p = pn;
            }

            // Scan ahead in the input for the first character that can
            // start a match, then recurse.
            loop {
                let (cs, sn) = utf8_read(zs, s);
                if cs == 0 {
                    return NOWILDCARDMATCH;
                }
                let hit = if no_case {
                    to_lower(cs) == to_lower(c)
                } else {
                    cs == c
                };
                s = sn;
                if !hit {
                    continue;
                }
                let b = pattern_compare(zp, p, zs, s, info, match_other);
                if b != NOMATCH {
                    return b;
                }
            }
        }
        if c == match_other && match_other != 0 {
            if info.match_set == 0 {
                let (ce, pe) = utf8_read(zp, p);
                if ce == 0 {
                    return NOMATCH;
                }
                c = ce;
                p = pe;
                escaped = Some(p);
            } else {
                // Character class: [..], [^..], ranges, ']' literal first.
                let (cs, sn) = utf8_read(zs, s);
                if cs == 0 {
                    return NOMATCH;
                }
                s = sn;
                let mut prior: u32 = 0;
                let mut seen = false;
                let mut invert = false;
                let (mut c2, pn2) = utf8_read(zp, p);
                p = pn2;
                if c2 == b'^' as u32 {
                    invert = true;
                    let r = utf8_read(zp, p);
                    c2 = r.0;
                    p = r.1;
                }
                if c2 == b']' as u32 {
                    if cs == b']' as u32 {
                        seen = true;
                    }
                    let r = utf8_read(zp, p);
                    c2 = r.0;
                    p = r.1;
                }
                while c2 != 0 && c2 != b']' as u32 {
                    let next = if p < zp.len() { zp[p] } else { 0 };
                    if c2 == b'-' as u32 && next != b']' && next != 0 && prior > 0 {
                        let r = utf8_read(zp, p);
                        c2 = r.0;
                        p = r.1;
                        if cs >= prior && cs <= c2 {
                            seen = true;
                        }
                        prior = 0;
                    } else {
                        if cs == c2 {
                            seen = true;
                        }
                        prior = c2;
                    }
                    let r = utf8_read(zp, p);
                    c2 = r.0;
                    p = r.1;
                }
                if c2 == 0 || (seen ^ invert) == false {
                    return NOMATCH;
                }
                continue;
            }
        }
        let (c2, sn) = utf8_read(zs, s);
        s = sn;
        if c == c2 {
            continue;
        }
        if no_case && c < 0x80 && c2 < 0x80 && to_lower(c) == to_lower(c2) {
            continue;
        }
        if c == match_one && escaped != Some(p) && c2 != 0 {
            continue;
        }
        return NOMATCH;
    }
    if s >= zs.len() || zs[s] == 0 {
        MATCH
    } else {
        NOMATCH
    }
}

fn skip_utf8(z: &[u8], mut i: usize) -> usize {
    if i < z.len() {
        let lead = z[i];
        i += 1;
        if lead >= 0xc0 {
            while i < z.len() && (z[i] & 0xc0) == 0x80 {
                i += 1;
            }
        }
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    fn like(p: &str, s: &str) -> bool {
        pattern_match(p.as_bytes(), s.as_bytes(), &LIKE_INFO, 0)
    }

    fn glob(p: &str, s: &str) -> bool {
        pattern_match(p.as_bytes(), s.as_bytes(), &GLOB_INFO, b'[' as u32)
    }

    #[test]
    fn like_basics() {
        assert!(like("./", "./"));
        assert!(like("a_c", "abc"));
        assert!(!like("a_c", "abbc"));
        assert!(like("a%", "abc"));
        assert!(like("%b%", "abc"));
        assert!(like("ABC", "abc"));
        assert!(like("", ""));
        assert!(!like("", "a"));
        assert!(like("%", ""));
        assert!(!like("_", ""));
        assert!(like("%_", "x"));
        assert!(!like("%_", ""));
    }

    #[test]
    fn glob_basics() {
        assert!(glob("a*c", "abc"));
        assert!(!glob("ABC", "abc"));
        assert!(glob("[a-z]", "q"));
        assert!(!glob("[a-z]", "Q"));
        assert!(glob("[^a-z]", "Q"));
        assert!(glob("[]]", "]"));
        assert!(glob("a[bc]d", "acd"));
        assert!(!glob("[", "x"));
        assert!(glob("*[0-9]", "abc7"));
    }
}
