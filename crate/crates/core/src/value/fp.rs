//! Decimal <-> IEEE754 conversion matching the target engine bit-for-bit.
//!
//! The engine converts between decimal text and doubles with its own
//! fixed-point routines rather than libc. Both directions are ported here
//! so that every coercion the interpreter predicts (CAST, `||`, TEXT
//! affinity, numeric parsing of text) lands on exactly the same bits and
//! the same rendered bytes as the engine produces. The power-of-ten
//! tables and the rounding quirks (19-significant-digit mantissa
//! saturation on parse, 17-digit round-trip shortening on render) are
//! deliberate copies of the engine's behavior.

const POWERSOF10_FIRST: i32 = -348;
const POWERSOF10_LAST: i32 = 347;

const LARGEST_INT64: i64 = i64::MAX;
const SMALLEST_INT64: i64 = i64::MIN;

#[rustfmt::skip]
static A_BASE: [u64; 27] = [
    0x8000000000000000, /*  0: 1.0e+0 << 63 */
    0xa000000000000000, /*  1: 1.0e+1 << 60 */
    0xc800000000000000, /*  2: 1.0e+2 << 57 */
    0xfa00000000000000, /*  3: 1.0e+3 << 54 */
    0x9c40000000000000, /*  4: 1.0e+4 << 50 */
    0xc350000000000000, /*  5: 1.0e+5 << 47 */
    0xf424000000000000, /*  6: 1.0e+6 << 44 */
    0x9896800000000000, /*  7: 1.0e+7 << 40 */
    0xbebc200000000000, /*  8: 1.0e+8 << 37 */
    0xee6b280000000000, /*  9: 1.0e+9 << 34 */
    0x9502f90000000000, /* 10: 1.0e+10 << 30 */
    0xba43b74000000000, /* 11: 1.0e+11 << 27 */
    0xe8d4a51000000000, /* 12: 1.0e+12 << 24 */
    0x9184e72a00000000, /* 13: 1.0e+13 << 20 */
    0xb5e620f480000000, /* 14: 1.0e+14 << 17 */
    0xe35fa931a0000000, /* 15: 1.0e+15 << 14 */
    0x8e1bc9bf04000000, /* 16: 1.0e+16 << 10 */
    0xb1a2bc2ec5000000, /* 17: 1.0e+17 << 7 */
    0xde0b6b3a76400000, /* 18: 1.0e+18 << 4 */
    0x8ac7230489e80000, /* 19: 1.0e+19 >> 0 */
    0xad78ebc5ac620000, /* 20: 1.0e+20 >> 3 */
    0xd8d726b7177a8000, /* 21: 1.0e+21 >> 6 */
    0x878678326eac9000, /* 22: 1.0e+22 >> 10 */
    0xa968163f0a57b400, /* 23: 1.0e+23 >> 13 */
    0xd3c21bcecceda100, /* 24: 1.0e+24 >> 16 */
    0x84595161401484a0, /* 25: 1.0e+25 >> 20 */
    0xa56fa5b99019a5c8, /* 26: 1.0e+26 >> 23 */
];

#[rustfmt::skip]
static A_SCALE: [u64; 26] = [
    0x8049a4ac0c5811ae, /*  0: 1.0e-351 << 1229 */
    0xcf42894a5dce35ea, /*  1: 1.0e-324 << 1140 */
    0xa76c582338ed2621, /*  2: 1.0e-297 << 1050 */
    0x873e4f75e2224e68, /*  3: 1.0e-270 << 960 */
    0xda7f5bf590966848, /*  4: 1.0e-243 << 871 */
    0xb080392cc4349dec, /*  5: 1.0e-216 << 781 */
    0x8e938662882af53e, /*  6: 1.0e-189 << 691 */
    0xe65829b3046b0afa, /*  7: 1.0e-162 << 602 */
    0xba121a4650e4ddeb, /*  8: 1.0e-135 << 512 */
    0x964e858c91ba2655, /*  9: 1.0e-108 << 422 */
    0xf2d56790ab41c2a2, /* 10: 1.0e-81 << 333 */
    0xc428d05aa4751e4c, /* 11: 1.0e-54 << 243 */
    0x9e74d1b791e07e48, /* 12: 1.0e-27 << 153 */
    0xcccccccccccccccc, /* 13: 1.0e-1 << 67 (special case) */
    0xcecb8f27f4200f3a, /* 14: 1.0e+27 >> 26 */
    0xa70c3c40a64e6c51, /* 15: 1.0e+54 >> 116 */
    0x86f0ac99b4e8dafd, /* 16: 1.0e+81 >> 206 */
    0xda01ee641a708de9, /* 17: 1.0e+108 >> 295 */
    0xb01ae745b101e9e4, /* 18: 1.0e+135 >> 385 */
    0x8e41ade9fbebc27d, /* 19: 1.0e+162 >> 475 */
    0xe5d3ef282a242e81, /* 20: 1.0e+189 >> 564 */
    0xb9a74a0637ce2ee1, /* 21: 1.0e+216 >> 654 */
    0x95f83d0a1fb69cd9, /* 22: 1.0e+243 >> 744 */
    0xf24a01a73cf2dccf, /* 23: 1.0e+270 >> 833 */
    0xc3b8358109e84f07, /* 24: 1.0e+297 >> 923 */
    0x9e19db92b4e31ba9, /* 25: 1.0e+324 >> 1013 */
];

#[rustfmt::skip]
static A_SCALE_LO: [u32; 26] = [
    0x205b896d, /*  0: 1.0e-351 */
    0x52064cad, /*  1: 1.0e-324 */
    0xaf2af2b8, /*  2: 1.0e-297 */
    0x5a7744a7, /*  3: 1.0e-270 */
    0xaf39a475, /*  4: 1.0e-243 */
    0xbd8d794e, /*  5: 1.0e-216 */
    0x547eb47b, /*  6: 1.0e-189 */
    0x0cb4a5a3, /*  7: 1.0e-162 */
    0x92f34d62, /*  8: 1.0e-135 */
    0x3a6a07f9, /*  9: 1.0e-108 */
    0xfae27299, /* 10: 1.0e-81 */
    0xaa97e14c, /* 11: 1.0e-54 */
    0x775ea265, /* 12: 1.0e-27 */
    0xcccccccc, /* 13: 1.0e-1 */
    0x00000000, /* 14: 1.0e+27 */
    0x999090b6, /* 15: 1.0e+54 */
    0x69a028bb, /* 16: 1.0e+81 */
    0xe80e6f48, /* 17: 1.0e+108 */
    0x5ec05dd0, /* 18: 1.0e+135 */
    0x14588f14, /* 19: 1.0e+162 */
    0x8f1668c9, /* 20: 1.0e+189 */
    0x6d953e2c, /* 21: 1.0e+216 */
    0x4abdaf10, /* 22: 1.0e+243 */
    0xbc633b39, /* 23: 1.0e+270 */
    0x0a862f81, /* 24: 1.0e+297 */
    0x6c07a2c2, /* 25: 1.0e+324 */
];

#[inline]
fn u64_bit(n: u32) -> u64 {
    1u64 << n
}

/// Upper and lower halves of a 64x64 -> 128 bit multiply.
#[inline]
fn multiply_128(a: u64, b: u64) -> (u64, u64) {
    let r = (a as u128) * (b as u128);
    ((r >> 64) as u64, r as u64)
}

/// Upper 64 bits and middle 32 bits of a 96x64 -> 160 bit multiply, where
/// the 96-bit operand is `(a << 32) + a_lo`.
#[inline]
fn multiply_160(a: u64, a_lo: u32, b: u64) -> (u64, u32) {
    let mut r = (a as u128) * (b as u128);
    r += ((a_lo as u128) * (b as u128)) >> 32;
    ((r >> 64) as u64, ((r >> 32) & 0xffff_ffff) as u32)
}

/// floor(log2(pow(10, p)))
#[inline]
fn pwr10to2(p: i32) -> i32 {
    (p * 108853) >> 15
}

/// floor(log10(pow(2, p)))
#[inline]
fn pwr2to10(p: i32) -> i32 {
    (p * 78913) >> 18
}

/// 10^p as a left-justified 96-bit fixed-point value `(hi, lo32)`.
fn power_of_ten(p: i32) -> (u64, u32) {
    debug_assert!((POWERSOF10_FIRST..=POWERSOF10_LAST).contains(&p));
    let g;
    let n;
    if p < 0 {
        if p == -1 {
            return (A_SCALE[13], A_SCALE_LO[13]);
        }
        let mut gg = p / 27;
        let mut nn = p % 27;
        if nn != 0 {
            gg -= 1;
            nn += 27;
        }
        g = gg;
        n = nn;
    } else if p < 27 {
        return (A_BASE[p as usize], 0);
    } else {
        g = p / 27;
        n = p % 27;
    }
    let s = A_SCALE[(g + 13) as usize];
    if n == 0 {
        return (s, A_SCALE_LO[(g + 13) as usize]);
    }
    let (mut x, mut lo) = multiply_160(s, A_SCALE_LO[(g + 13) as usize], A_BASE[n as usize]);
    if (u64_bit(63) & x) == 0 {
        x = (x << 1) | ((lo as u64 >> 31) & 1);
        lo = (lo << 1) | 1;
    }
    (x, lo)
}

/// Closest IEEE754 double to `d * 10^p`, computed the way the engine does.
///
/// Inputs with mantissas wider than 19 digits have already been saturated
/// by the tokenizer, so the occasional sub-ULP rounding difference against
/// a correctly-rounded parse is intentional and matches the engine.
pub fn fp10_to_double(d: u64, p: i32) -> f64 {
    if p < POWERSOF10_FIRST {
        return 0.0;
    }
    if p > POWERSOF10_LAST {
        return f64::INFINITY;
    }
    debug_assert!(d > 0);
    let b = 64 - d.leading_zeros() as i32;
    let lp = pwr10to2(p);
    let mut e = 53 - b - lp;
    if e > 1074 {
        if e >= 1130 {
            return 0.0;
        }
        e = 1074;
    }
    let s = -(e - (64 - b) + lp + 3);
    debug_assert!((0..64).contains(&s));
    let (mut pwr10h, mut pwr10l) = power_of_ten(p);
    if pwr10l != 0 {
        pwr10h = pwr10h.wrapping_add(1);
        pwr10l = !pwr10l;
    }
    let x = d << (64 - b);
    let (mut hi, lo) = multiply_128(x, pwr10h);
    let mid1 = (lo >> 32) as u32;
    let mut sticky: u64 = 1;
    if (hi & (u64_bit(s as u32) - 1)) == 0 {
        let (h2, _) = multiply_128(x, (pwr10l as u64) << 32);
        let mid2 = (h2 >> 32) as u32;
        sticky = (mid1.wrapping_sub(mid2) > 1) as u64;
        hi -= (mid1 < mid2) as u64;
    }
    let mut u = (hi >> s) | sticky;
    let adj = (u >= u64_bit(55) - 2) as i32;
    if adj != 0 {
        u = (u >> 1) | (u & 1);
        e -= 1;
    }
    let mut m = (u + 1 + ((u >> 2) & 1)) >> 2;
    if e <= -972 {
        return f64::INFINITY;
    }
    if (m & u64_bit(52)) != 0 {
        m = (m & !u64_bit(52)) | (((1075 - e) as u64) << 52);
    }
    f64::from_bits(m)
}

/// Given `r == m * 2^e` with the top bit of `m` set, produce `(d, p)` with
/// `r ~= d * 10^p` and `d` carrying `n` significant digits.
fn fp2_to_decimal(m: u64, e: i32, n: i32) -> (u64, i32) {
    debug_assert!((1..=18).contains(&n));
    let p = n - 1 - pwr2to10(e + 63);
    let (ph, _) = power_of_ten(p);
    let (h, _) = multiply_128(m, ph);
    let d = if n == 18 {
        let sh = -(e + pwr10to2(p) + 2);
        debug_assert!((0..=63).contains(&sh));
        let h = h >> sh;
        (h + ((h << 1) & 2)) >> 1
    } else {
        let sh = -(e + pwr10to2(p) + 1);
        debug_assert!((0..=63).contains(&sh));
        h >> sh
    };
    (d, -p)
}

/// Decoded decimal form of a double: `0.digits * 10^decimal_point`.
pub struct FpDecoded {
    pub negative: bool,
    /// None for finite values; Some(false) = infinity, Some(true) = NaN.
    pub special: Option<bool>,
    pub digits: Vec<u8>,
    pub decimal_point: i32,
}

/// Engine-style float decode: round to `i_round` significant digits
/// (capped at `mx_round`), with the 17-digit round-trip shortening pass.
pub fn fp_decode(r: f64, i_round: i32, mx_round: i32) -> FpDecoded {
    debug_assert!(mx_round > 0);
    let mut out = FpDecoded {
        negative: false,
        special: None,
        digits: Vec::new(),
        decimal_point: 0,
    };
    let mut r = r;
    if r < 0.0 {
        out.negative = true;
        r = -r;
    } else if r == 0.0 {
        out.digits.push(b'0');
        out.decimal_point = 1;
        return out;
    }
    let bits = r.to_bits();
    let mut e = ((bits >> 52) & 0x7ff) as i32;
    let mut v = bits;
    if e == 0x7ff {
        out.special = Some(v != 0x7ff0000000000000);
        return out;
    }
    v &= 0x000f_ffff_ffff_ffff;
    if e == 0 {
        let nn = v.leading_zeros() as i32;
        v <<= nn;
        e = -1074 - nn;
    } else {
        v = (v << 11) | u64_bit(63);
        e -= 1086;
    }
    let n_extract = if i_round <= 0 || i_round >= 18 {
        18
    } else {
        i_round + 1
    };
    let (v, exp) = fp2_to_decimal(v, e, n_extract);

    let mut z: Vec<u8> = v.to_string().into_bytes();
    let mut n = z.len() as i32;
    out.decimal_point = n + exp;

    let mut i_round = i_round;
    if i_round <= 0 {
        i_round = out.decimal_point - i_round;
        if i_round == 0 && z[0] >= b'5' {
            i_round = 1;
            z.insert(0, b'0');
            n += 1;
            out.decimal_point += 1;
        }
    }
    if i_round > 0 && (i_round < n || n > mx_round) {
        let mut i_round = i_round.min(mx_round);
        if i_round == 17 && n >= 16 {
            // Precision 17 only happens for the engine's own float->text
            // conversion. Try to shorten to a form that still parses back
            // to the identical double.
            if z[15] == b'9' && z[14] == b'9' {
                let mut jj: usize = 14;
                while jj > 0 && z[jj - 1] == b'9' {
                    jj -= 1;
                }
                let v2 = if jj == 0 {
                    1u64
                } else {
                    let mut acc = 0u64;
                    for &c in &z[..jj] {
                        acc = acc * 10 + (c - b'0') as u64;
                    }
                    acc + 1
                };
                if r == fp10_to_double(v2, exp + n - jj as i32) {
                    i_round = jj as i32 + 1;
                }
            } else if out.decimal_point >= n || (z[15] == b'0' && z[14] == b'0' && z[13] == b'0') {
                let mut jj: usize = 13;
                while jj > 0 && z[jj - 1] == b'0' {
                    jj -= 1;
                }
                let mut v2 = 0u64;
                for &c in &z[..jj] {
                    v2 = v2 * 10 + (c - b'0') as u64;
                }
                if v2 > 0 && r == fp10_to_double(v2, exp + n - jj as i32) {
                    i_round = jj as i32 + 1;
                }
            }
        }
        n = i_round;
        if z[i_round as usize] >= b'5' {
            let mut j = i_round - 1;
            loop {
                z[j as usize] += 1;
                if z[j as usize] <= b'9' {
                    break;
                }
                z[j as usize] = b'0';
                if j == 0 {
                    z.insert(0, b'1');
                    n += 1;
                    out.decimal_point += 1;
                    break;
                }
                j -= 1;
            }
        }
    }
    debug_assert!(n > 0);
    while z[(n - 1) as usize] == b'0' {
        n -= 1;
        debug_assert!(n > 0);
    }
    z.truncate(n as usize);
    out.digits = z;
    out
}

/// Render a double exactly as the engine's `%!.17g` does (the conversion
/// used for CAST to TEXT, concatenation, and TEXT affinity).
pub fn format_double(r: f64) -> Vec<u8> {
    let s = fp_decode(r, 17, 20);
    match s.special {
        Some(true) => return b"NaN".to_vec(),
        Some(false) => {
            return if s.negative {
                b"-Inf".to_vec()
            } else {
                b"Inf".to_vec()
            }
        }
        None => {}
    }
    let mut out: Vec<u8> = Vec::with_capacity(32);
    if s.negative {
        out.push(b'-');
    }
    let exp = s.decimal_point - 1;
    let n = s.digits.len() as i32;
    let mut precision = 17 - 1;
    if exp < -4 || exp > precision {
        // exponential form: d.ddd e+XX
        out.push(s.digits[0]);
        out.push(b'.');
        if n > 1 {
            out.extend_from_slice(&s.digits[1..]);
        }
        while out.last() == Some(&b'0') {
            out.pop();
        }
        if out.last() == Some(&b'.') {
            out.push(b'0');
        }
        out.push(b'e');
        let mut ex = exp;
        if ex < 0 {
            out.push(b'-');
            ex = -ex;
        } else {
            out.push(b'+');
        }
        if ex >= 100 {
            out.push(b'0' + (ex / 100) as u8);
            ex %= 100;
        }
        out.push(b'0' + (ex / 10) as u8);
        out.push(b'0' + (ex % 10) as u8);
    } else {
        precision -= exp;
        let mut e2 = s.decimal_point - 1;
        let mut j: i32 = 0;
        if e2 < 0 {
            out.push(b'0');
        } else {
            j = e2 + 1;
            if j > n {
                j = n;
            }
            out.extend_from_slice(&s.digits[..j as usize]);
            e2 -= j;
            if e2 >= 0 {
                for _ in 0..=e2 {
                    out.push(b'0');
                }
                e2 = -1;
            }
        }
        out.push(b'.');
        if e2 < -1 && precision > 0 {
            let mut nn = -1 - e2;
            if nn > precision {
                nn = precision;
            }
            for _ in 0..nn {
                out.push(b'0');
            }
            precision -= nn;
        }
        if precision > 0 {
            let nn = n - j;
            if nn > 0 {
                out.extend_from_slice(&s.digits[j as usize..(j + nn) as usize]);
            }
        }
        while out.last() == Some(&b'0') {
            out.pop();
        }
        if out.last() == Some(&b'.') {
            out.push(b'0');
        }
    }
    out
}

/// Result flags from the decimal tokenizer, mirroring the engine's parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AtofResult {
    /// Positive when the whole input is a valid number, zero when no prefix
    /// parses, negative when a valid prefix is followed by junk.
    pub rc: i32,
}

impl AtofResult {
    /// Entire input was a well-formed number.
    pub fn fully_valid(self) -> bool {
        self.rc > 0
    }
    /// The number had no decimal point and no exponent.
    pub fn integer_form(self) -> bool {
        (self.rc & 2) == 0
    }
}

#[inline]
fn is_space(c: u8) -> bool {
    matches!(c, b' ' | b'\t' | b'\n' | b'\x0b' | b'\x0c' | b'\r')
}

#[inline]
fn is_digit(c: u8) -> bool {
    c.is_ascii_digit()
}

/// Text to double, stopping at an interior NUL like the engine does.
/// Returns the parsed value (of the longest valid prefix) plus the result
/// flags; see [`AtofResult`].
pub fn sqlite_atof(z: &[u8]) -> (f64, AtofResult) {
    const SAT: u64 = (u64::MAX - 9) / 10;
    // Emulate NUL-terminated scanning.
    let at = |i: usize| -> u8 {
        if i < z.len() {
            z[i]
        } else {
            0
        }
    };
    let mut i = 0usize;
    while is_space(at(i)) && at(i) != 0 {
        i += 1;
    }
    let mut neg = false;
    let mut s: u64 = 0;
    let mut d: i32 = 0;
    let mut m_state: i32 = 0;

    if at(i) == b'-' {
        neg = true;
        i += 1;
    } else if at(i) == b'+' {
        i += 1;
    }
    if is_digit(at(i)) && at(i) != 0 {
        m_state = 1;
        s = (at(i) - b'0') as u64;
        i += 1;
        while is_digit(at(i)) {
            s = s * 10 + (at(i) - b'0') as u64;
            i += 1;
            if s >= SAT {
                m_state = 9;
                while is_digit(at(i)) {
                    i += 1;
                    d += 1;
                }
                break;
            }
        }
    }

    if at(i) == b'.' {
        i += 1;
        if is_digit(at(i)) {
            m_state |= 1;
            loop {
                if s < SAT {
                    s = s * 10 + (at(i) - b'0') as u64;
                    d -= 1;
                } else {
                    m_state = 11;
                }
                i += 1;
                if !is_digit(at(i)) {
                    break;
                }
            }
        } else if m_state == 0 {
            return (0.0, AtofResult { rc: 0 });
        }
        m_state |= 2;
    } else if m_state == 0 {
        return (0.0, AtofResult { rc: 0 });
    }

    if at(i) == b'e' || at(i) == b'E' {
        let e_pos = i;
        i += 1;
        let esign: i32;
        if at(i) == b'-' {
            esign = -1;
            i += 1;
        } else {
            esign = 1;
            if at(i) == b'+' {
                i += 1;
            }
        }
        if is_digit(at(i)) {
            let mut exp: i32 = 0;
            m_state |= 2;
            while is_digit(at(i)) {
                exp = if exp < 10000 {
                    exp * 10 + (at(i) - b'0') as i32
                } else {
                    10000
                };
                i += 1;
            }
            d += esign * exp;
        } else {
            // Incomplete exponent: the tail check below sees the 'e'.
            i = e_pos;
        }
    }

    let mut result = if s == 0 {
        m_state |= 4;
        0.0
    } else {
        fp10_to_double(s, d)
    };
    if neg {
        result = -result;
    }

    if at(i) == 0 {
        return (result, AtofResult { rc: m_state });
    }
    if is_space(at(i)) {
        while is_space(at(i)) && at(i) != 0 {
            i += 1;
        }
        if at(i) == 0 {
            return (result, AtofResult { rc: m_state });
        }
    }
    (
        result,
        AtofResult {
            rc: (0xfffffff0u32 as i32) | m_state,
        },
    )
}

fn compare_2pow63(z: &[u8]) -> i32 {
    const POW63: &[u8] = b"922337203685477580";
    let mut c: i32 = 0;
    for (i, &p) in POW63.iter().enumerate() {
        if c != 0 {
            break;
        }
        c = (z[i] as i32 - p as i32) * 10;
    }
    if c == 0 {
        c = z[18] as i32 - b'8' as i32;
    }
    c
}

/// Text to i64 with the engine's exact return convention:
/// 0 = clean parse, -1 = no digits, 1 = trailing junk,
/// 2 = out of range (value clamped), 3 = exactly 2^63 with a '+' sign.
/// The parsed (or clamped) value is always produced.
pub fn sqlite_atoi64(z: &[u8]) -> (i64, i32) {
    let len = z.len();
    let mut i = 0usize;
    while i < len && is_space(z[i]) {
        i += 1;
    }
    let mut neg = false;
    if i < len {
        if z[i] == b'-' {
            neg = true;
            i += 1;
        } else if z[i] == b'+' {
            i += 1;
        }
    }
    let z_start = i;
    while i < len && z[i] == b'0' {
        i += 1;
    }
    let digits_start = i;
    let mut u: u64 = 0;
    while i < len && is_digit(z[i]) {
        u = u.wrapping_mul(10).wrapping_add((z[i] - b'0') as u64);
        i += 1;
    }
    let ndigit = i - digits_start;

    let mut value: i64 = if u > LARGEST_INT64 as u64 {
        if neg {
            SMALLEST_INT64
        } else {
            LARGEST_INT64
        }
    } else if neg {
        -(u as i64)
    } else {
        u as i64
    };

    let mut rc = 0;
    if ndigit == 0 && z_start == digits_start {
        rc = -1;
    } else if i < len {
        let mut jj = i;
        while jj < len {
            if !is_space(z[jj]) {
                rc = 1;
                break;
            }
            jj += 1;
        }
    }
    if ndigit < 19 {
        (value, rc)
    } else {
        let c = if ndigit > 19 {
            1
        } else {
            compare_2pow63(&z[digits_start..])
        };
        if c < 0 {
            (value, rc)
        } else {
            value = if neg { SMALLEST_INT64 } else { LARGEST_INT64 };
            if c > 0 {
                (value, 2)
            } else if neg {
                (value, rc)
            } else {
                (value, 3)
            }
        }
    }
}

/// Decimal text of an i64, identical to the engine's integer rendering.
pub fn bytes_from_i64(i: i64) -> Vec<u8> {
    i.to_string().into_bytes()
}

/// Float to integer with the engine's saturating conversion.
pub fn double_to_i64(r: f64) -> i64 {
    if r.is_nan() {
        return 0;
    }
    if r < -9223372036854774784.0 {
        return SMALLEST_INT64;
    }
    if r > 9223372036854774784.0 {
        return LARGEST_INT64;
    }
    r as i64
}

/// True when converting `r` to `i` and back is a provable no-op. The engine
/// additionally requires the magnitude to stay below 2^51.
pub fn real_same_as_int(r: f64, i: i64) -> bool {
    let r2 = i as f64;
    r == 0.0
        || (r.to_bits() == r2.to_bits() && (-2251799813685248..2251799813685248).contains(&i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fmt(r: f64) -> String {
        String::from_utf8(format_double(r)).unwrap()
    }

    #[test]
    fn formats_simple_reals() {
        assert_eq!(fmt(0.0), "0.0");
        assert_eq!(fmt(-0.0), "0.0");
        assert_eq!(fmt(1.0), "1.0");
        assert_eq!(fmt(-1.5), "-1.5");
        assert_eq!(fmt(100.0), "100.0");
        assert_eq!(fmt(0.1), "0.1");
        assert_eq!(fmt(0.0001), "0.0001");
        assert_eq!(fmt(1e-5), "1.0e-05");
        assert_eq!(fmt(1e20), "1.0e+20");
        assert_eq!(fmt(0.1 + 0.2), "0.30000000000000004");
        assert_eq!(fmt(f64::INFINITY), "Inf");
        assert_eq!(fmt(f64::NEG_INFINITY), "-Inf");
    }

    #[test]
    fn atof_flags() {
        let (v, rc) = sqlite_atof(b"123");
        assert_eq!(v, 123.0);
        assert!(rc.fully_valid() && rc.integer_form());

        let (v, rc) = sqlite_atof(b"1.5");
        assert_eq!(v, 1.5);
        assert!(rc.fully_valid() && !rc.integer_form());

        let (v, rc) = sqlite_atof(b"5abc");
        assert_eq!(v, 5.0);
        assert!(!rc.fully_valid() && rc.integer_form());

        let (v, rc) = sqlite_atof(b"abc");
        assert_eq!(v, 0.0);
        assert_eq!(rc.rc, 0);

        let (v, rc) = sqlite_atof(b"  -2.5e3  ");
        assert_eq!(v, -2500.0);
        assert!(rc.fully_valid());

        let (_, rc) = sqlite_atof(b"5e");
        assert!(!rc.fully_valid() && rc.integer_form());

        let (v, rc) = sqlite_atof(b".5");
        assert_eq!(v, 0.5);
        assert!(rc.fully_valid());

        let (v, rc) = sqlite_atof(b"1e999");
        assert!(v.is_infinite());
        assert!(rc.fully_valid());
    }

    #[test]
    fn atoi64_cases() {
        assert_eq!(sqlite_atoi64(b"123"), (123, 0));
        assert_eq!(sqlite_atoi64(b" -42 "), (-42, 0));
        assert_eq!(sqlite_atoi64(b"123abc"), (123, 1));
        assert_eq!(sqlite_atoi64(b"abc"), (0, -1));
        assert_eq!(sqlite_atoi64(b"9223372036854775807"), (i64::MAX, 0));
        assert_eq!(sqlite_atoi64(b"9223372036854775808"), (i64::MAX, 3));
        assert_eq!(sqlite_atoi64(b"-9223372036854775808"), (i64::MIN, 0));
        assert_eq!(sqlite_atoi64(b"-9223372036854775809"), (i64::MIN, 2));
        assert_eq!(sqlite_atoi64(b"99999999999999999999"), (i64::MAX, 2));
        assert_eq!(sqlite_atoi64(b"0000000000000000000000007"), (7, 0));
    }

    #[test]
    fn parse_round_trips_own_rendering() {
        let mut x = 0x243f6a8885a308d3u64;
        for _ in 0..20000 {
            // xorshift; cover the full exponent range including subnormals
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            let r = f64::from_bits(x);
            if !r.is_finite() {
                continue;
            }
            let text = format_double(r);
            let (back, rc) = sqlite_atof(&text);
            assert!(rc.fully_valid(), "{}", String::from_utf8_lossy(&text));
            assert_eq!(
                back.to_bits(),
                r.to_bits(),
                "round-trip failed for {} -> {}",
                r,
                String::from_utf8_lossy(&text)
            );
        }
    }
}
